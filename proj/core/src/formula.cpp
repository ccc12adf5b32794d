#include "amp/formula.hpp"

#include <algorithm>
#include <stdexcept>

namespace amp {

ReadOnceFormula::ReadOnceFormula() {
  kind_.push_back(kLeaf);
  a_.push_back(0);
  b_.push_back(0);
  leaves_ = 1;
}

ReadOnceFormula ReadOnceFormula::leaf() { return ReadOnceFormula(); }

ReadOnceFormula ReadOnceFormula::gate(Kind kind, const ReadOnceFormula& l, const ReadOnceFormula& r) {
  if (kind == kLeaf) throw std::invalid_argument("gate: kind must be kAnd or kOr");
  ReadOnceFormula f{empty_tag{}};
  size_t nl = l.node_count(), nr = r.node_count();
  f.kind_.reserve(nl + nr + 1);
  f.a_.reserve(nl + nr + 1);
  f.b_.reserve(nl + nr + 1);
  f.kind_ = l.kind_;
  f.a_ = l.a_;
  f.b_ = l.b_;
  // right child's nodes shift by nl, its leaves by l.leaf_count()
  for (uint32_t id = 0; id < nr; ++id) {
    f.kind_.push_back(r.kind_[id]);
    if (r.kind_[id] == kLeaf) {
      f.a_.push_back(r.a_[id] + static_cast<uint32_t>(l.leaves_));
      f.b_.push_back(0);
    } else {
      f.a_.push_back(r.a_[id] + static_cast<uint32_t>(nl));
      f.b_.push_back(r.b_[id] + static_cast<uint32_t>(nl));
    }
  }
  f.kind_.push_back(static_cast<uint8_t>(kind));
  f.a_.push_back(static_cast<uint32_t>(nl - 1));
  f.b_.push_back(static_cast<uint32_t>(nl + nr - 1));
  f.leaves_ = l.leaves_ + r.leaves_;
  return f;
}

uint32_t ReadOnceFormula::depth() const {
  std::vector<uint32_t> d(node_count());
  for (uint32_t id = 0; id < node_count(); ++id)
    d[id] = kind(id) == kLeaf ? 0 : 1 + std::max(d[a_[id]], d[b_[id]]);
  return d.back();
}

int ReadOnceFormula::eval(const std::vector<uint8_t>& leaf_bits) const {
  std::vector<uint8_t> val(node_count());
  for (uint32_t id = 0; id < node_count(); ++id) {
    switch (kind(id)) {
      case kLeaf: val[id] = leaf_bits[a_[id]] & 1; break;
      case kAnd:  val[id] = val[a_[id]] & val[b_[id]]; break;
      default:    val[id] = val[a_[id]] | val[b_[id]]; break;
    }
  }
  return val.back();
}

double ReadOnceFormula::accept_prob(double p) const {
  std::vector<double> val(node_count());
  for (uint32_t id = 0; id < node_count(); ++id) {
    switch (kind(id)) {
      case kLeaf: val[id] = p; break;
      case kAnd:  val[id] = val[a_[id]] * val[b_[id]]; break;
      default:    val[id] = val[a_[id]] + val[b_[id]] - val[a_[id]] * val[b_[id]]; break;
    }
  }
  return val.back();
}

bool ReadOnceFormula::read_once() const {
  std::vector<uint8_t> seen(leaves_, 0);
  uint64_t count = 0;
  for (uint32_t id = 0; id < node_count(); ++id) {
    if (kind(id) != kLeaf) continue;
    if (a_[id] >= leaves_ || seen[a_[id]]) return false;
    seen[a_[id]] = 1;
    ++count;
  }
  return count == leaves_;
}

std::string ReadOnceFormula::serialize() const {
  std::vector<std::string> val(node_count());
  for (uint32_t id = 0; id < node_count(); ++id) {
    switch (kind(id)) {
      case kLeaf: val[id] = std::to_string(a_[id]); break;
      case kAnd:  val[id] = "(and " + val[a_[id]] + " " + val[b_[id]] + ")"; break;
      default:    val[id] = "(or " + val[a_[id]] + " " + val[b_[id]] + ")"; break;
    }
  }
  return val.back();
}

namespace {

struct Parser {
  const std::string& s;
  size_t pos = 0;

  void skip_ws() { while (pos < s.size() && s[pos] == ' ') ++pos; }

  [[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("formula parse error at offset " + std::to_string(pos) + ": " + msg);
  }

  uint32_t parse_expr(ReadOnceFormula::Builder& b) {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input");
    if (s[pos] == '(') {
      ++pos;
      skip_ws();
      ReadOnceFormula::Kind k;
      if (s.compare(pos, 3, "and") == 0) { k = ReadOnceFormula::kAnd; pos += 3; }
      else if (s.compare(pos, 2, "or") == 0) { k = ReadOnceFormula::kOr; pos += 2; }
      else fail("expected 'and' or 'or'");
      uint32_t l = parse_expr(b);
      uint32_t r = parse_expr(b);
      skip_ws();
      if (pos >= s.size() || s[pos] != ')') fail("expected ')'");
      ++pos;
      return b.add_gate(k, l, r);
    }
    if (!isdigit(static_cast<unsigned char>(s[pos]))) fail("expected leaf index or '('");
    uint64_t idx = 0;
    while (pos < s.size() && isdigit(static_cast<unsigned char>(s[pos]))) {
      idx = idx * 10 + static_cast<uint64_t>(s[pos] - '0');
      ++pos;
    }
    (void)idx;  // leaf indices are assigned in reading order; validated below
    return b.add_leaf();
  }
};

}  // namespace

ReadOnceFormula ReadOnceFormula::parse(const std::string& text) {
  // Leaves must be numbered 0..k-1 in left-to-right reading order, matching
  // serialize(); we re-scan the text to check the written indices.
  Builder b;
  Parser p{text};
  p.parse_expr(b);
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  ReadOnceFormula f = std::move(b).take();
  // verify indices in the text agree with reading order
  uint64_t expect = 0;
  for (size_t i = 0; i < text.size();) {
    if (isdigit(static_cast<unsigned char>(text[i]))) {
      uint64_t idx = 0;
      while (i < text.size() && isdigit(static_cast<unsigned char>(text[i])))
        idx = idx * 10 + static_cast<uint64_t>(text[i++] - '0');
      if (idx != expect++)
        throw std::invalid_argument("formula parse error: leaf indices must be 0..k-1 in reading order");
    } else {
      ++i;
    }
  }
  return f;
}

}  // namespace amp
