#pragma once

// Brute-force reference implementations used to check the library. They work
// on raw box lists and sample points, never on library algorithms beyond the
// Box accessors.
//
// Sample points live in doubled coordinates: an even component is an integer
// millimeter, an odd one a half-integer. Every open cell of the cubical
// complex spanned by integer boxes contains exactly one such point, so
// membership at those points decides point-set questions exactly.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cvlab/btmodel.hpp"
#include "cvlab/geometry.hpp"

namespace oracle {

using cvlab::Box;
using cvlab::Coord;
using cvlab::Region;
using P2 = std::array<std::int64_t, 3>;

/// Raw box list; converts from anything the tests hold boxes in.
struct Boxes {
  std::vector<Box> items;

  Boxes() = default;
  Boxes(std::vector<Box> v) : items(std::move(v)) {}
  Boxes(std::span<const Box> s) : items(s.begin(), s.end()) {}
  Boxes(std::initializer_list<Box> l) : items(l) {}
  Boxes(const Region& r) : Boxes(r.boxes()) {}

  auto begin() const { return items.begin(); }
  auto end() const { return items.end(); }
};

inline bool in_box(const Box& b, const P2& p) {
  for (int i = 0; i < 3; ++i) {
    if (p[i] < 2 * b.min()[i] || p[i] > 2 * b.max()[i]) return false;
  }
  return true;
}

inline bool member(const Boxes& boxes, const P2& p) {
  return std::any_of(boxes.begin(), boxes.end(), [&](const Box& b) { return in_box(b, p); });
}


/// Doubled-coordinate window around every box, with one step of margin.
struct Window {
  P2 lo{0, 0, 0};
  P2 hi{-1, -1, -1};

  void include(const Box& b) {
    for (int i = 0; i < 3; ++i) {
      if (hi[i] < lo[i]) {
        lo[i] = 2 * b.min()[i] - 1;
        hi[i] = 2 * b.max()[i] + 1;
      } else {
        lo[i] = std::min(lo[i], 2 * b.min()[i] - 1);
        hi[i] = std::max(hi[i], 2 * b.max()[i] + 1);
      }
    }
  }
  void include(const Boxes& boxes) {
    for (const Box& b : boxes) include(b);
  }
  bool empty() const { return hi[0] < lo[0]; }

  void for_each(const std::function<void(const P2&)>& f) const {
    if (empty()) return;
    for (std::int64_t x = lo[0]; x <= hi[0]; ++x)
      for (std::int64_t y = lo[1]; y <= hi[1]; ++y)
        for (std::int64_t z = lo[2]; z <= hi[2]; ++z) f({x, y, z});
  }
  bool any_of(const std::function<bool(const P2&)>& f) const {
    bool found = false;
    if (empty()) return false;
    for (std::int64_t x = lo[0]; x <= hi[0] && !found; ++x)
      for (std::int64_t y = lo[1]; y <= hi[1] && !found; ++y)
        for (std::int64_t z = lo[2]; z <= hi[2] && !found; ++z) found = f({x, y, z});
    return found;
  }
};

inline Window window_of(const Boxes& a, const Boxes& b = Boxes{}) {
  Window w;
  w.include(a);
  w.include(b);
  return w;
}

inline bool contains(const Boxes& outer, const Boxes& inner) {
  const Window w = window_of(inner);
  return !w.any_of([&](const P2& p) { return member(inner, p) && !member(outer, p); });
}

inline bool equal(const Boxes& a, const Boxes& b) { return contains(a, b) && contains(b, a); }

inline bool intersects(const Boxes& a, const Boxes& b) {
  const Window w = window_of(a, b);
  return w.any_of([&](const P2& p) { return member(a, p) && member(b, p); });
}

/// A unit-cell center (all components odd) shared by both sets means the
/// intersection has positive volume, and vice versa.
inline bool overlap_positive(const Boxes& a, const Boxes& b) {
  const Window w = window_of(a, b);
  return w.any_of([&](const P2& p) {
    return (p[0] & 1) && (p[1] & 1) && (p[2] & 1) && member(a, p) && member(b, p);
  });
}

/// p is interior to the set iff every unit cell whose closure holds p is in it.
inline bool interior(const Boxes& r, const P2& p) {
  std::vector<std::int64_t> choices[3];
  for (int i = 0; i < 3; ++i) {
    if (p[i] & 1) {
      choices[i] = {p[i]};
    } else {
      choices[i] = {p[i] - 1, p[i] + 1};
    }
  }
  for (auto x : choices[0])
    for (auto y : choices[1])
      for (auto z : choices[2])
        if (!member(r, P2{x, y, z})) return false;
  return true;
}

inline bool inside_interior(const Boxes& outer, const Boxes& inner) {
  const Window w = window_of(inner);
  return !w.any_of([&](const P2& p) { return member(inner, p) && !interior(outer, p); });
}

inline cvlab::RccRelation rcc(const Boxes& a, const Boxes& b) {
  using R = cvlab::RccRelation;
  if (!intersects(a, b)) return R::Disconnected;
  const bool a_in_b = contains(b, a);
  const bool b_in_a = contains(a, b);
  if (a_in_b && b_in_a) return R::Equal;
  if (a_in_b) return inside_interior(b, a) ? R::InsideProper : R::InsideTouching;
  if (b_in_a) return inside_interior(a, b) ? R::ContainsProper : R::ContainsTouching;
  if (overlap_positive(a, b)) return R::Overlapping;
  return R::BoundaryContact;
}

inline std::vector<Box> translated(const Boxes& boxes, const cvlab::Vec3& v) {
  std::vector<Box> out;
  for (const Box& b : boxes) {
    out.emplace_back(cvlab::Vec3{b.min()[0] + v[0], b.min()[1] + v[1], b.min()[2] + v[2]},
                     cvlab::Vec3{b.max()[0] + v[0], b.max()[1] + v[1], b.max()[2] + v[2]});
  }
  return out;
}

// --- behavioral types -------------------------------------------------------

/// Mode at t by scanning the schedule for the last segment starting at or
/// before t.
inline std::string mode_at(const cvlab::BehaviorType& bt, cvlab::Tick t) {
  std::string mode;
  for (const cvlab::ModeSegment& s : bt.schedule) {
    if (s.start <= t) mode = s.mode;
  }
  return mode;
}

struct Eval {
  std::vector<Box> occupied;
  std::vector<Box> sensed;
  std::set<std::string> events;
};

/// Evaluates every clause of `bt` at t and collects raw, translated boxes.
inline Eval evaluate(const cvlab::BehaviorType& bt, cvlab::Tick t) {
  Eval out;
  const std::string mode = mode_at(bt, t);
  for (const cvlab::Clause& c : bt.clauses) {
    if (t < c.guard.ticks.first || t > c.guard.ticks.last || !c.guard.modes.contains(mode)) continue;
    if (auto* o = std::get_if<cvlab::Occupy>(&c.effect)) {
      for (const Box& b : translated(o->region.boxes(), bt.frame)) out.occupied.push_back(b);
    } else if (auto* s = std::get_if<cvlab::SensorCoverage>(&c.effect)) {
      for (const Box& b : translated(s->region.boxes(), bt.frame)) out.sensed.push_back(b);
    } else {
      out.events.insert(std::get<cvlab::Emits>(c.effect).event);
    }
  }
  return out;
}

/// Earliest tick at which two box-list streams share a positive volume.
inline std::optional<cvlab::Tick> first_overlap(const std::function<std::vector<Box>(cvlab::Tick)>& a,
                                                const std::function<std::vector<Box>(cvlab::Tick)>& b,
                                                cvlab::Tick horizon) {
  for (cvlab::Tick t = 0; t <= horizon; ++t) {
    if (overlap_positive(a(t), b(t))) return t;
  }
  return std::nullopt;
}

}  // namespace oracle
