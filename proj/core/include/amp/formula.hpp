#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace amp {

// Read-once monotone AND/OR formula over leaves 0..k-1.  Nodes are stored in
// a pool with children strictly before parents, so folds are simple forward
// scans; the root is the last node.
class ReadOnceFormula {
 public:
  enum Kind : uint8_t { kLeaf = 0, kAnd = 1, kOr = 2 };

  ReadOnceFormula();  // single leaf, index 0

  static ReadOnceFormula leaf();
  static ReadOnceFormula gate(Kind kind, const ReadOnceFormula& l, const ReadOnceFormula& r);

  uint64_t leaf_count() const { return leaves_; }
  size_t node_count() const { return kind_.size(); }
  uint32_t root() const { return static_cast<uint32_t>(kind_.size() - 1); }
  Kind kind(uint32_t id) const { return static_cast<Kind>(kind_[id]); }
  uint32_t left(uint32_t id) const { return a_[id]; }
  uint32_t right(uint32_t id) const { return b_[id]; }
  uint32_t leaf_index(uint32_t id) const { return a_[id]; }
  uint32_t depth() const;

  int eval(const std::vector<uint8_t>& leaf_bits) const;

  // Short-circuiting evaluation; f(leaf_index) is called only for leaves the
  // lazy evaluation actually reads.
  template <typename LeafFn>
  int eval_lazy(LeafFn&& f) const { return eval_lazy_node(root(), f); }

  // Pr[f accepts] when each leaf is independently 1 with probability p:
  // leaf -> p, AND -> a*b, OR -> a+b-a*b.  Exact gate-by-gate composition,
  // valid because the formula is read-once.
  double accept_prob(double p) const;

  // Generic fold with value type T; Ops must provide leaf(i), and_(x,y),
  // or_(x,y).  Used for exact rational composition and posterior decoding.
  template <typename T, typename Ops>
  T fold(const Ops& ops) const {
    std::vector<T> val;
    val.reserve(node_count());
    for (uint32_t id = 0; id < node_count(); ++id) {
      switch (kind(id)) {
        case kLeaf: val.push_back(ops.leaf(a_[id])); break;
        case kAnd:  val.push_back(ops.and_(val[a_[id]], val[b_[id]])); break;
        default:    val.push_back(ops.or_(val[a_[id]], val[b_[id]])); break;
      }
    }
    return val.back();
  }

  // True iff the leaf indices are exactly 0..k-1, each appearing once.
  bool read_once() const;

  // Nested-list text form: leaf -> decimal index, gate -> "(and L R)" or
  // "(or L R)".  parse() accepts exactly this grammar.
  std::string serialize() const;
  static ReadOnceFormula parse(const std::string& text);

  class Builder;  // pool builder; avoids quadratic concatenation

 private:
  struct empty_tag {};
  explicit ReadOnceFormula(empty_tag) {}
  friend class Builder;

  template <typename LeafFn>
  int eval_lazy_node(uint32_t id, LeafFn& f) const {
    while (true) {
      Kind k = kind(id);
      if (k == kLeaf) return f(a_[id]) ? 1 : 0;
      int lv = eval_lazy_node(a_[id], f);
      if (k == kAnd && lv == 0) return 0;
      if (k == kOr && lv == 1) return 1;
      id = b_[id];  // tail call on the right child
    }
  }

  std::vector<uint8_t> kind_;
  std::vector<uint32_t> a_, b_;
  uint64_t leaves_ = 0;
};

class ReadOnceFormula::Builder {
 public:
  Builder() : f_(empty_tag{}) {}

  uint32_t add_leaf() {
    f_.kind_.push_back(kLeaf);
    f_.a_.push_back(static_cast<uint32_t>(f_.leaves_++));
    f_.b_.push_back(0);
    return static_cast<uint32_t>(f_.kind_.size() - 1);
  }
  uint32_t add_gate(Kind k, uint32_t l, uint32_t r) {
    f_.kind_.push_back(static_cast<uint8_t>(k));
    f_.a_.push_back(l);
    f_.b_.push_back(r);
    return static_cast<uint32_t>(f_.kind_.size() - 1);
  }
  ReadOnceFormula take() && { return std::move(f_); }

 private:
  ReadOnceFormula f_;
};

}  // namespace amp
