#pragma once

// Relational checks between behavioral types and traces: conformance,
// refinement, compatibility and composition of placed parts.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvlab/btmodel.hpp"
#include "cvlab/error.hpp"
#include "cvlab/geometry.hpp"

namespace cvlab {

enum class VerdictStatus { Pass, Fail };
enum class WitnessKind { Occupancy, Sensor, Event };

std::string_view to_string(VerdictStatus status) noexcept;
std::string_view to_string(WitnessKind kind) noexcept;

/// Evidence for a failed check. `tick` is always set; the other fields are
/// filled when the check has something to say about them.
struct Witness {
  Tick tick = 0;
  WitnessKind kind = WitnessKind::Occupancy;
  Region region;
  std::optional<EventId> event;
  std::vector<std::string> components;
  std::optional<RccRelation> relation;
  std::optional<Box> cell;

  friend bool operator==(const Witness&, const Witness&) = default;
};

struct Verdict {
  VerdictStatus status = VerdictStatus::Pass;
  std::optional<Witness> witness;  // present iff status == Fail
  std::string explanation;

  bool passed() const noexcept { return status == VerdictStatus::Pass; }

  static Verdict pass(std::string explanation = {});
  static Verdict fail(Witness witness, std::string explanation);

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Every record of `trace` stays within what `bt` allows at its tick.
/// Fails at the earliest violating tick; occupancy is checked before sensors
/// before events.
Verdict conforms(const Trace& trace, const BehaviorType& bt, Tick horizon);

/// `sub` may replace `super`: per tick it occupies no more space and provides
/// at least the same sensor coverage and events.
Verdict refines(const BehaviorType& sub, const BehaviorType& super, Tick horizon);

/// No tick at which the two types overlap with positive volume.
Verdict compatible(const BehaviorType& a, const BehaviorType& b, Tick horizon);

/// Raised by compose() when two placed parts collide.
class IncompatibleParts : public Error {
 public:
  IncompatibleParts(const std::string& what, Verdict verdict) : Error(what), verdict_(std::move(verdict)) {}
  const char* kind() const noexcept override { return "incompatible-parts"; }
  const Verdict& verdict() const noexcept { return verdict_; }

 private:
  Verdict verdict_;
};

struct PlacedPart {
  BehaviorType behavior;
  Vec3 offset{};
};

/// Infers the type of an assembly: per tick, occupancy, coverage and events
/// are the union over the translated parts. Composite modes are tuple labels
/// "(m1,m2,...)" of the part modes. The composite horizon is the smallest part
/// horizon. Throws IncompatibleParts if any placed pair collides.
BehaviorType compose(std::span<const PlacedPart> parts, std::string composite_id);

}  // namespace cvlab
