#pragma once

#include <string>

#include "cosserat/swimmer.hpp"

namespace cosserat {

// CSV layout: header `step,time,node,x,y,z,qx,qy,qz,px,py,pz`, one row per
// node per recorded frame, every number printed with 17 significant digits
// so a write/read cycle is bit-exact for doubles.
void write_trace(const SimulationTrace& trace, const std::string& path);

// Inverse of write_trace. Frame metadata that the CSV does not carry is
// reconstructed where possible (dt and stride from the first two frames) and
// zeroed otherwise (nominal motor torque). Rejects malformed headers, ragged
// frames and non-numeric cells with ParseError.
SimulationTrace read_trace(const std::string& path);

}  // namespace cosserat
