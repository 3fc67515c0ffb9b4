#include "cvlab/geometry.hpp"

#include <algorithm>
#include <string>

#include "cvlab/error.hpp"

namespace cvlab {

namespace {

Coord add_or_throw(Coord a, Coord b) {
  Coord out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw OverflowError("coordinate overflow adding " + std::to_string(a) + " and " + std::to_string(b));
  }
  return out;
}

Coord mul_or_throw(Coord a, Coord b) {
  Coord out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw OverflowError("coordinate overflow scaling " + std::to_string(a));
  }
  return out;
}

// One axis of a piece produced by box difference. Unlike Box axes, the ends
// may be open: subtracting a closed box leaves half-open slabs behind.
struct Span {
  Coord lo = 0;
  Coord hi = 0;
  bool lo_closed = true;
  bool hi_closed = true;

  bool empty() const noexcept { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }
};

struct Piece {
  std::array<Span, 3> axes;

  explicit Piece(const Box& box) {
    for (std::size_t a = 0; a < 3; ++a) axes[a] = Span{box.min()[a], box.max()[a], true, true};
  }

  Box closure() const {
    return Box({axes[0].lo, axes[1].lo, axes[2].lo}, {axes[0].hi, axes[1].hi, axes[2].hi});
  }
};

// s ∩ (-inf, cut)
Span below(const Span& s, Coord cut) {
  if (s.hi < cut) return s;
  return Span{s.lo, cut, s.lo_closed, false};
}

// s ∩ (cut, +inf)
Span above(const Span& s, Coord cut) {
  if (s.lo > cut) return s;
  return Span{cut, s.hi, false, s.hi_closed};
}

// s ∩ [lo, hi]
Span clamp(const Span& s, Coord lo, Coord hi) {
  Span out = s;
  if (s.lo < lo) {
    out.lo = lo;
    out.lo_closed = true;
  }
  if (s.hi > hi) {
    out.hi = hi;
    out.hi_closed = true;
  }
  return out;
}

bool piece_meets(const Piece& p, const Box& b) {
  for (std::size_t a = 0; a < 3; ++a) {
    if (clamp(p.axes[a], b.min()[a], b.max()[a]).empty()) return false;
  }
  return true;
}

// Appends p \ b to out as disjoint pieces (slab decomposition, axis by axis).
void subtract(const Piece& p, const Box& b, std::vector<Piece>& out) {
  if (!piece_meets(p, b)) {
    out.push_back(p);
    return;
  }
  Piece rest = p;
  for (std::size_t a = 0; a < 3; ++a) {
    const Span s = rest.axes[a];
    const Span lower = below(s, b.min()[a]);
    const Span upper = above(s, b.max()[a]);
    if (!lower.empty()) {
      Piece slab = rest;
      slab.axes[a] = lower;
      out.push_back(slab);
    }
    if (!upper.empty()) {
      Piece slab = rest;
      slab.axes[a] = upper;
      out.push_back(slab);
    }
    rest.axes[a] = clamp(s, b.min()[a], b.max()[a]);
  }
}

// Pieces of `box` not covered by `outer`.
std::vector<Piece> remainder(const Box& box, std::span<const Box> outer) {
  std::vector<Piece> pieces{Piece(box)};
  std::vector<Piece> next;
  for (const Box& cover : outer) {
    next.clear();
    for (const Piece& p : pieces) subtract(p, cover, next);
    pieces.swap(next);
    if (pieces.empty()) break;
  }
  return pieces;
}

// Doubles every coordinate; with integer data, a ⊆ interior(b) iff the
// doubled a grown by one unit still fits inside the doubled b.
Region doubled(const Region& r, Coord grow) {
  std::vector<Box> out;
  out.reserve(r.boxes().size());
  for (const Box& b : r.boxes()) {
    Vec3 lo{};
    Vec3 hi{};
    for (std::size_t a = 0; a < 3; ++a) {
      lo[a] = add_or_throw(mul_or_throw(b.min()[a], 2), -grow);
      hi[a] = add_or_throw(mul_or_throw(b.max()[a], 2), grow);
    }
    out.emplace_back(lo, hi);
  }
  return Region(std::move(out));
}

}  // namespace

Vec3 checked_add(const Vec3& a, const Vec3& b) {
  return {add_or_throw(a[0], b[0]), add_or_throw(a[1], b[1]), add_or_throw(a[2], b[2])};
}

Vec3 checked_negate(const Vec3& v) {
  Vec3 out{};
  for (std::size_t a = 0; a < 3; ++a) out[a] = mul_or_throw(v[a], -1);
  return out;
}

Box::Box(const Vec3& min, const Vec3& max) : min_(min), max_(max) {
  for (std::size_t a = 0; a < 3; ++a) {
    if (min[a] > max[a]) {
      throw InvariantViolation("box min exceeds max on axis " + std::to_string(a) + " (" +
                               std::to_string(min[a]) + " > " + std::to_string(max[a]) + ")");
    }
  }
}

bool Box::has_volume() const noexcept {
  return extent(0) > 0 && extent(1) > 0 && extent(2) > 0;
}

bool Box::contains(const Vec3& p) const noexcept {
  for (std::size_t a = 0; a < 3; ++a) {
    if (p[a] < min_[a] || p[a] > max_[a]) return false;
  }
  return true;
}

Box Box::translated(const Vec3& offset) const {
  return Box(checked_add(min_, offset), checked_add(max_, offset));
}

Region::Region(std::vector<Box> boxes) : boxes_(std::move(boxes)) {
  std::sort(boxes_.begin(), boxes_.end());
  boxes_.erase(std::unique(boxes_.begin(), boxes_.end()), boxes_.end());
}

Region::Region(std::initializer_list<Box> boxes) : Region(std::vector<Box>(boxes)) {}

std::optional<Box> Region::bounds() const {
  if (boxes_.empty()) return std::nullopt;
  Vec3 lo = boxes_.front().min();
  Vec3 hi = boxes_.front().max();
  for (const Box& b : boxes_) {
    for (std::size_t a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], b.min()[a]);
      hi[a] = std::max(hi[a], b.max()[a]);
    }
  }
  return Box(lo, hi);
}

Region Region::translated(const Vec3& offset) const {
  std::vector<Box> out;
  out.reserve(boxes_.size());
  for (const Box& b : boxes_) out.push_back(b.translated(offset));
  return Region(std::move(out));
}

bool operator==(const Region& a, const Region& b) {
  if (a.same_representation(b)) return true;
  return region_contains(a, b) && region_contains(b, a);
}

Region box_intersection(const Box& a, const Box& b) {
  Vec3 lo{};
  Vec3 hi{};
  for (std::size_t i = 0; i < 3; ++i) {
    lo[i] = std::max(a.min()[i], b.min()[i]);
    hi[i] = std::min(a.max()[i], b.max()[i]);
    if (lo[i] > hi[i]) return Region();
  }
  return Region(Box(lo, hi));
}

Region region_intersection(const Region& a, const Region& b) {
  std::vector<Box> out;
  for (const Box& x : a.boxes()) {
    for (const Box& y : b.boxes()) {
      const Region piece = box_intersection(x, y);
      out.insert(out.end(), piece.boxes().begin(), piece.boxes().end());
    }
  }
  return Region(std::move(out));
}

Region region_union(std::span<const Region> regions) {
  std::vector<Box> out;
  for (const Region& r : regions) out.insert(out.end(), r.boxes().begin(), r.boxes().end());
  return Region(std::move(out));
}

Region region_union(const Region& a, const Region& b) {
  const std::array<Region, 2> both{a, b};
  return region_union(both);
}

bool region_contains(const Region& outer, const Region& inner) {
  for (const Box& box : inner.boxes()) {
    if (!remainder(box, outer.boxes()).empty()) return false;
  }
  return true;
}

std::vector<Box> uncovered_boxes(const Region& inner, const Region& outer) {
  std::vector<Box> out;
  for (const Box& box : inner.boxes()) {
    for (const Piece& p : remainder(box, outer.boxes())) out.push_back(p.closure());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool region_intersects(const Region& a, const Region& b) {
  for (const Box& x : a.boxes()) {
    for (const Box& y : b.boxes()) {
      if (!box_intersection(x, y).empty()) return true;
    }
  }
  return false;
}

bool region_overlap_volume_positive(const Region& a, const Region& b) {
  for (const Box& x : a.boxes()) {
    for (const Box& y : b.boxes()) {
      const Region piece = box_intersection(x, y);
      if (!piece.empty() && piece.boxes().front().has_volume()) return true;
    }
  }
  return false;
}

Region positive_volume_overlap(const Region& a, const Region& b) {
  std::vector<Box> out;
  for (const Box& x : a.boxes()) {
    for (const Box& y : b.boxes()) {
      const Region piece = box_intersection(x, y);
      if (!piece.empty() && piece.boxes().front().has_volume()) out.push_back(piece.boxes().front());
    }
  }
  return Region(std::move(out));
}

bool region_inside_interior(const Region& outer, const Region& inner) {
  if (inner.empty()) return true;
  return region_contains(doubled(outer, 0), doubled(inner, 1));
}

RccRelation rcc_relate(const Region& a, const Region& b) {
  if (a.empty() || b.empty()) throw InvariantViolation("rcc_relate requires non-empty regions");
  if (!region_intersects(a, b)) return RccRelation::Disconnected;
  const bool a_in_b = region_contains(b, a);
  const bool b_in_a = region_contains(a, b);
  if (a_in_b && b_in_a) return RccRelation::Equal;
  if (a_in_b) {
    return region_inside_interior(b, a) ? RccRelation::InsideProper : RccRelation::InsideTouching;
  }
  if (b_in_a) {
    return region_inside_interior(a, b) ? RccRelation::ContainsProper : RccRelation::ContainsTouching;
  }
  return region_overlap_volume_positive(a, b) ? RccRelation::Overlapping : RccRelation::BoundaryContact;
}

RccRelation converse(RccRelation relation) noexcept {
  switch (relation) {
    case RccRelation::InsideTouching: return RccRelation::ContainsTouching;
    case RccRelation::InsideProper: return RccRelation::ContainsProper;
    case RccRelation::ContainsTouching: return RccRelation::InsideTouching;
    case RccRelation::ContainsProper: return RccRelation::InsideProper;
    default: return relation;
  }
}

namespace {
constexpr std::array<std::pair<RccRelation, std::string_view>, 8> kRccNames{{
    {RccRelation::Disconnected, "disconnected"},
    {RccRelation::BoundaryContact, "boundary_contact"},
    {RccRelation::Overlapping, "overlapping"},
    {RccRelation::InsideTouching, "inside_touching"},
    {RccRelation::InsideProper, "inside_proper"},
    {RccRelation::ContainsTouching, "contains_touching"},
    {RccRelation::ContainsProper, "contains_proper"},
    {RccRelation::Equal, "equal"},
}};
}  // namespace

std::string_view to_string(RccRelation relation) noexcept {
  for (const auto& [r, name] : kRccNames) {
    if (r == relation) return name;
  }
  return "unknown";
}

std::optional<RccRelation> rcc_from_string(std::string_view name) noexcept {
  for (const auto& [r, n] : kRccNames) {
    if (n == name) return r;
  }
  return std::nullopt;
}

}  // namespace cvlab
