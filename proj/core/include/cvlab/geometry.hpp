#pragma once

// Discrete 3D spatial core. Regions are finite unions of closed, axis-aligned
// boxes with integer millimeter coordinates. All predicates are exact and
// work on point sets of real coordinates, not on the box representation.

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace cvlab {

using Coord = std::int64_t;
using Vec3 = std::array<Coord, 3>;

/// Component-wise a + b; throws OverflowError if any axis overflows.
Vec3 checked_add(const Vec3& a, const Vec3& b);
/// Component-wise -v; throws OverflowError for the minimum coordinate.
Vec3 checked_negate(const Vec3& v);

/// Closed axis-aligned box [min, max]. May be degenerate (a face, edge or point).
class Box {
 public:
  /// The single point at the origin.
  Box() = default;
  /// Throws InvariantViolation unless min[i] <= max[i] on every axis.
  Box(const Vec3& min, const Vec3& max);

  const Vec3& min() const noexcept { return min_; }
  const Vec3& max() const noexcept { return max_; }

  Coord extent(std::size_t axis) const noexcept { return max_[axis] - min_[axis]; }
  /// Strictly positive extent on all three axes.
  bool has_volume() const noexcept;
  bool contains(const Vec3& point) const noexcept;

  Box translated(const Vec3& offset) const;

  friend auto operator<=>(const Box&, const Box&) = default;

 private:
  Vec3 min_{};
  Vec3 max_{};
};

/// A finite union of boxes. The empty union is the empty region.
///
/// Equality compares point sets: two regions are equal when they cover the
/// same points, whatever boxes they are built from.
class Region {
 public:
  Region() = default;
  explicit Region(std::vector<Box> boxes);
  Region(std::initializer_list<Box> boxes);
  explicit Region(const Box& box) : Region{box} {}

  std::span<const Box> boxes() const noexcept { return boxes_; }
  bool empty() const noexcept { return boxes_.empty(); }

  /// Smallest box enclosing every box of the region; nullopt when empty.
  std::optional<Box> bounds() const;
  Region translated(const Vec3& offset) const;

  /// Same boxes in the same (canonical) order; stricter than operator==.
  bool same_representation(const Region& other) const noexcept { return boxes_ == other.boxes_; }

  friend bool operator==(const Region& a, const Region& b);

 private:
  std::vector<Box> boxes_;
};

/// Point-set intersection of two boxes: empty, or a single box.
Region box_intersection(const Box& a, const Box& b);
Region region_intersection(const Region& a, const Region& b);

Region region_union(std::span<const Region> regions);
Region region_union(const Region& a, const Region& b);

/// True iff every point of `inner` lies in `outer`.
bool region_contains(const Region& outer, const Region& inner);

/// True iff the regions share at least one point.
bool region_intersects(const Region& a, const Region& b);

/// True iff the intersection contains a box with positive extent on all axes.
/// Boundary contact alone is not overlap.
bool region_overlap_volume_positive(const Region& a, const Region& b);

/// The positive-volume pieces of a ∩ b (pairwise box intersections), sorted.
Region positive_volume_overlap(const Region& a, const Region& b);

/// Closures of the pieces of `inner` not covered by `outer`, sorted; empty iff
/// region_contains(outer, inner).
std::vector<Box> uncovered_boxes(const Region& inner, const Region& outer);

/// True iff every point of `inner` is an interior point of `outer`.
bool region_inside_interior(const Region& outer, const Region& inner);

/// Eight-way qualitative relation between two non-empty regions.
enum class RccRelation {
  Disconnected,      // no shared point
  BoundaryContact,   // shared points, none with volume, no containment
  Overlapping,       // shared volume, neither contains the other
  InsideTouching,    // a ⊂ b, a reaches b's boundary
  InsideProper,      // a ⊂ interior(b)
  ContainsTouching,  // b ⊂ a, b reaches a's boundary
  ContainsProper,    // b ⊂ interior(a)
  Equal,
};

/// Throws InvariantViolation if either region is empty.
RccRelation rcc_relate(const Region& a, const Region& b);

/// The relation of (b, a) given the relation of (a, b).
RccRelation converse(RccRelation relation) noexcept;

std::string_view to_string(RccRelation relation) noexcept;
std::optional<RccRelation> rcc_from_string(std::string_view name) noexcept;

}  // namespace cvlab
