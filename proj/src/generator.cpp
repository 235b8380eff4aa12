#include "generator.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace ziptrace {

Pattern pattern_from_name(const std::string& name) {
  if (name == "inc-loop") return Pattern::IncLoop;
  if (name == "lock-loop") return Pattern::LockLoop;
  if (name == "random") return Pattern::Random;
  throw UsageError("unknown pattern '" + name + "' (expected inc-loop, lock-loop or random)");
}

std::string pattern_name(Pattern p) {
  switch (p) {
    case Pattern::IncLoop:
      return "inc-loop";
    case Pattern::LockLoop:
      return "lock-loop";
    case Pattern::Random:
      return "random";
  }
  return "?";
}

namespace {

Trace loop_trace(const GenSpec& spec, bool locked) {
  if (spec.threads == 0) throw UsageError("loop patterns need at least one worker thread");
  Symbols sym;
  ThreadId main{sym.threads.intern("main")};
  std::vector<ThreadId> workers;
  for (std::uint32_t k = 1; k <= spec.threads; ++k)
    workers.push_back(ThreadId{sym.threads.intern("t" + std::to_string(k))});
  VarId y{sym.vars.intern("y")};
  LockId l{};
  if (locked) l = LockId{sym.locks.intern("l")};

  std::vector<EventLabel> ev;
  ev.reserve(2 * workers.size() + spec.iterations * workers.size() * (locked ? 4 : 2));
  for (auto w : workers) ev.push_back(EventLabel::fork(main, w));
  for (std::uint64_t i = 0; i < spec.iterations; ++i)
    for (auto w : workers) {
      if (locked) ev.push_back(EventLabel::acquire(w, l));
      ev.push_back(EventLabel::read(w, y));
      ev.push_back(EventLabel::write(w, y));
      if (locked) ev.push_back(EventLabel::release(w, l));
    }
  for (auto w : workers) ev.push_back(EventLabel::join(main, w));
  return Trace(std::move(sym), std::move(ev));
}

class RandomBuilder {
 public:
  explicit RandomBuilder(const GenSpec& spec) : spec_(spec), rng_(spec.seed) {
    if (spec.threads == 0 || spec.vars == 0)
      throw UsageError("random traces need at least one thread and one variable");
    threads_.resize(spec.threads);
    threads_[0].state = State::Running;
    owner_.assign(spec.locks, kNobody);
    depth_.assign(spec.locks, 0);
  }

  Trace build() {
    while (labels_.size() < spec_.iterations) {
      if (labels_.size() >= 4 && chance(0.2))
        replay();
      else
        step();
    }
    return Trace(std::move(sym_), std::move(labels_));
  }

 private:
  enum class State { Unborn, Running, Joined };
  struct ThreadState {
    State state = State::Unborn;
    std::uint32_t parent = 0;
    std::vector<std::uint32_t> held;  // lock stack, innermost last
  };
  static constexpr std::uint32_t kNobody = ~0u;
  static constexpr std::uint32_t kMaxReentrancy = 3;

  const GenSpec& spec_;
  std::mt19937_64 rng_;
  Symbols sym_;
  std::vector<EventLabel> labels_;
  std::vector<std::uint32_t> label_thread_;  // generator thread index per label, for replay
  std::vector<ThreadState> threads_;
  std::vector<std::uint32_t> owner_, depth_;
  std::map<std::uint32_t, std::uint32_t> thread_of_id_, lock_of_id_;

  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }
  std::uint32_t pick(std::size_t n) {
    return static_cast<std::uint32_t>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_));
  }

  ThreadId tid(std::uint32_t k) {
    ThreadId id{sym_.threads.intern("T" + std::to_string(k))};
    thread_of_id_[id.value] = k;
    return id;
  }
  LockId lid(std::uint32_t k) {
    LockId id{sym_.locks.intern("L" + std::to_string(k))};
    lock_of_id_[id.value] = k;
    return id;
  }
  VarId vid(std::uint32_t k) { return VarId{sym_.vars.intern("x" + std::to_string(k))}; }

  bool can_acquire(std::uint32_t t, std::uint32_t l) const {
    return owner_[l] == kNobody || (owner_[l] == t && depth_[l] < kMaxReentrancy);
  }
  bool can_join(std::uint32_t t, std::uint32_t c) const {
    return c != t && threads_[c].state == State::Running && threads_[c].parent == t && threads_[c].held.empty();
  }

  void emit(std::uint32_t t, EventLabel l) {
    labels_.push_back(l);
    label_thread_.push_back(t);
  }

  // Applies an action for generator thread t; the caller checked legality.
  void acquire(std::uint32_t t, std::uint32_t l) {
    owner_[l] = t;
    ++depth_[l];
    threads_[t].held.push_back(l);
    emit(t, EventLabel::acquire(tid(t), lid(l)));
  }
  void release(std::uint32_t t) {
    std::uint32_t l = threads_[t].held.back();
    threads_[t].held.pop_back();
    if (--depth_[l] == 0) owner_[l] = kNobody;
    emit(t, EventLabel::release(tid(t), lid(l)));
  }
  void fork(std::uint32_t t, std::uint32_t c) {
    threads_[c].state = State::Running;
    threads_[c].parent = t;
    emit(t, EventLabel::fork(tid(t), tid(c)));
  }
  void join(std::uint32_t t, std::uint32_t c) {
    threads_[c].state = State::Joined;
    emit(t, EventLabel::join(tid(t), tid(c)));
  }

  void step() {
    std::vector<std::uint32_t> running;
    for (std::uint32_t k = 0; k < threads_.size(); ++k)
      if (threads_[k].state == State::Running) running.push_back(k);
    const std::uint32_t t = running[pick(running.size())];
    auto& me = threads_[t];

    double roll = std::uniform_real_distribution<double>(0, 1)(rng_);
    if (roll < 0.12 && spec_.locks > 0) {
      std::uint32_t l = pick(spec_.locks);
      if (can_acquire(t, l)) return acquire(t, l);
    } else if (roll < 0.24 && !me.held.empty()) {
      return release(t);
    } else if (roll < 0.32) {
      for (std::uint32_t c = 0; c < threads_.size(); ++c)
        if (threads_[c].state == State::Unborn) return fork(t, c);
    } else if (roll < 0.40) {
      std::vector<std::uint32_t> children;
      for (std::uint32_t c = 0; c < threads_.size(); ++c)
        if (can_join(t, c)) children.push_back(c);
      if (!children.empty()) return join(t, children[pick(children.size())]);
    }
    std::uint32_t x = pick(spec_.vars);
    if (chance(0.5))
      emit(t, EventLabel::read(tid(t), vid(x)));
    else
      emit(t, EventLabel::write(tid(t), vid(x)));
  }

  // Re-issues a recent window of labels while each stays legal.
  void replay() {
    std::size_t len = 2 + pick(11);
    len = std::min(len, labels_.size());
    std::size_t from = pick(labels_.size() - len + 1);
    for (std::size_t k = from; k < from + len && labels_.size() < spec_.iterations; ++k) {
      const EventLabel l = labels_[k];
      const std::uint32_t t = label_thread_[k];
      if (threads_[t].state != State::Running) return;
      switch (l.op) {
        case OpKind::Read:
        case OpKind::Write:
          emit(t, l);
          break;
        case OpKind::Acquire: {
          std::uint32_t lk = lock_index(l.lock());
          if (!can_acquire(t, lk)) return;
          acquire(t, lk);
          break;
        }
        case OpKind::Release: {
          auto& held = threads_[t].held;
          if (held.empty() || held.back() != lock_index(l.lock())) return;
          release(t);
          break;
        }
        case OpKind::Fork:
          return;  // a thread is forked once
        case OpKind::Join: {
          std::uint32_t c = thread_of_id_.at(l.target().value);
          if (!can_join(t, c)) return;
          join(t, c);
          break;
        }
      }
    }
  }

  std::uint32_t lock_index(LockId id) const { return lock_of_id_.at(id.value); }
};

}  // namespace

Trace gen_trace(const GenSpec& spec) {
  switch (spec.pattern) {
    case Pattern::IncLoop:
      return loop_trace(spec, false);
    case Pattern::LockLoop:
      return loop_trace(spec, true);
    case Pattern::Random:
      return RandomBuilder(spec).build();
  }
  throw UsageError("unknown pattern");
}

}  // namespace ziptrace
