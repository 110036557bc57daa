#include "chorex/equivalence.hpp"

#include <cassert>
#include <deque>
#include <map>

#include "chorex/printer.hpp"

namespace chorex {

std::vector<std::pair<TransitionLabel, Program>> program_enabled(const Program& p) {
  std::vector<std::pair<TransitionLabel, Program>> out;
  for (std::size_t i = 0; i < p.components.size(); ++i) {
    for (auto& [label, succ] : chor_enabled(p.components[i])) {
      Program next = p;
      next.components[i] = std::move(succ);
      out.emplace_back(label, std::move(next));
    }
  }
  return out;
}

namespace {

struct PendingPair {
  Program left;
  Program right;
};

// Drops a common leading chain of identical prefix actions from both mains.
// One side running the same independent actions ahead of a loop makes the
// reachable pair set infinite; a pair <s;C1, s;C2> is simulated whenever
// <C1, C2> is (the shared prefix gates both sides identically and matches per
// label are unique), so such pairs collapse onto their stripped core.
void strip_common_prefix(Choreography& l, Choreography& r) {
  ChorBodyPtr a = l.main;
  ChorBodyPtr b = r.main;
  bool stripped = false;
  for (;;) {
    const auto* ca = std::get_if<ComC>(&a->node());
    const auto* cb = std::get_if<ComC>(&b->node());
    if (ca && cb && ca->sender == cb->sender && ca->expr == cb->expr &&
        ca->receiver == cb->receiver) {
      a = ca->cont;
      b = cb->cont;
      stripped = true;
      continue;
    }
    const auto* sa = std::get_if<SelC>(&a->node());
    const auto* sb = std::get_if<SelC>(&b->node());
    if (sa && sb && sa->sender == sb->sender && sa->receiver == sb->receiver &&
        sa->label == sb->label) {
      a = sa->cont;
      b = sb->cont;
      stripped = true;
      continue;
    }
    break;
  }
  if (stripped) {
    l = Choreography{l.defs, a};
    r = Choreography{r.defs, b};
  }
}

void normalize_pair(Program& l, Program& r) {
  if (l.components.size() == 1 && r.components.size() == 1)
    strip_common_prefix(l.components[0], r.components[0]);
}

}  // namespace

SimResult simulates(const Program& left, const Program& right, const SimOptions& opts) {
  SimResult res;
  std::deque<PendingPair> work;
  std::set<std::pair<std::string, std::string>> seen;

  auto push = [&](Program l, Program r) {
    normalize_pair(l, r);
    auto key = std::make_pair(print_program(l), print_program(r));
    if (seen.count(key)) return true;
    if (seen.size() >= opts.max_pairs) return false;
    seen.insert(std::move(key));
    work.push_back({std::move(l), std::move(r)});
    return true;
  };

  if (!push(left, right)) {
    res.kind = SimKind::Unknown;
    return res;
  }

  while (!work.empty()) {
    PendingPair pair;
    if (opts.order == SimOptions::Order::Fifo) {
      pair = std::move(work.front());
      work.pop_front();
    } else {
      pair = std::move(work.back());
      work.pop_back();
    }
    ++res.pairs_explored;

    auto left_moves = program_enabled(pair.left);
    auto right_moves = program_enabled(pair.right);
    std::map<std::string, const Program*> right_by_label;
    for (const auto& [label, succ] : right_moves) {
      bool inserted = right_by_label.emplace(to_string(label), &succ).second;
      assert(inserted && "successor must be unique per label");
      (void)inserted;
    }
    std::set<std::string> left_labels;
    for (auto& [label, succ] : left_moves) {
      std::string text = to_string(label);
      bool fresh = left_labels.insert(text).second;
      assert(fresh && "successor must be unique per label");
      (void)fresh;
      auto it = right_by_label.find(text);
      if (it == right_by_label.end()) {
        res.kind = SimKind::NotSimilar;
        res.witness = text + " at pair <" + print_program(pair.left) + " ; " +
                      print_program(pair.right) + ">";
        return res;
      }
      if (!push(std::move(succ), *it->second)) {
        res.kind = SimKind::Unknown;
        return res;
      }
    }
  }
  res.kind = SimKind::Similar;
  res.relation = std::move(seen);
  return res;
}

SimResult simulates(const Choreography& left, const Choreography& right, const SimOptions& opts) {
  return simulates(Program{{left}}, Program{{right}}, opts);
}

SimResult bisimilar(const Program& a, const Program& b, const SimOptions& opts) {
  SimResult forward = simulates(a, b, opts);
  if (forward.kind == SimKind::NotSimilar) return forward;
  SimResult backward = simulates(b, a, opts);
  if (backward.kind == SimKind::NotSimilar) return backward;
  SimResult res;
  res.pairs_explored = forward.pairs_explored + backward.pairs_explored;
  if (forward.kind == SimKind::Unknown || backward.kind == SimKind::Unknown) {
    res.kind = SimKind::Unknown;
    return res;
  }
  res.kind = SimKind::Similar;
  res.relation = std::move(forward.relation);
  return res;
}

SimResult bisimilar(const Choreography& a, const Choreography& b, const SimOptions& opts) {
  return bisimilar(Program{{a}}, Program{{b}}, opts);
}

}  // namespace chorex
