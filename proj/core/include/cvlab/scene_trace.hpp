#pragma once

// JSON-lines export of a simulation run for external visualizers. One object
// per (tick, component), ordered by tick then component id:
//   {"tick":0,"component":"A","site":"L_A","kind":"physical",
//    "occupied":[[x0,y0,z0,x1,y1,z1],...],"sensed":[...],"events":[...],
//    "inbound_events":[{"from":"B","event":"e"}],"inbound_sensed":[...]}

#include <cstddef>
#include <ostream>

#include "cvlab/simulate.hpp"

namespace cvlab {

/// Writes the scene trace and returns the number of lines written. Throws
/// Error if the stream fails.
std::size_t export_scene_trace(const SimulationResult& result, std::ostream& out);

/// One JSON object per message, in send order.
std::size_t export_message_log(const SimulationResult& result, std::ostream& out);

}  // namespace cvlab
