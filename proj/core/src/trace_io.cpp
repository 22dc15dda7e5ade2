#include "cosserat/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cosserat/errors.hpp"

namespace cosserat {

namespace {

constexpr const char* kHeader = "step,time,node,x,y,z,qx,qy,qz,px,py,pz";

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double cell_to_double(const std::string& cell, const std::string& where) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw ParseError(where + ": not a number: '" + cell + "'");
  }
  if (used != cell.size()) throw ParseError(where + ": trailing junk in '" + cell + "'");
  return x;
}

}  // namespace

void write_trace(const SimulationTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no newline translation
  if (!out) throw IoError("cannot open trace file for writing: " + path);
  out << kHeader << '\n';
  for (const TraceFrame& f : trace.frames) {
    for (std::size_t i = 0; i < f.positions.size(); ++i) {
      out << f.step << ',' << num(f.time) << ',' << i;
      const Vec3& x = f.positions[i];
      const Vec3& q = f.q[i];
      const Vec3& p = f.p[i];
      for (int c = 0; c < 3; ++c) out << ',' << num(x[c]);
      for (int c = 0; c < 3; ++c) out << ',' << num(q[c]);
      for (int c = 0; c < 3; ++c) out << ',' << num(p[c]);
      out << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

SimulationTrace read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw ParseError(path + ": unexpected header '" + line + "'");

  SimulationTrace trace;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 12) throw ParseError(where + ": expected 12 columns");

    const double step_val = cell_to_double(cells[0], where);
    const double time = cell_to_double(cells[1], where);
    const double node_val = cell_to_double(cells[2], where);
    if (step_val < 0 || node_val < 0) throw ParseError(where + ": negative index");
    const auto step = static_cast<std::size_t>(step_val);
    const auto node = static_cast<std::size_t>(node_val);

    if (trace.frames.empty() || trace.frames.back().step != step) {
      if (node != 0) throw ParseError(where + ": frame must start at node 0");
      TraceFrame f;
      f.step = step;
      f.time = time;
      trace.frames.push_back(std::move(f));
    }
    TraceFrame& f = trace.frames.back();
    if (node != f.positions.size()) throw ParseError(where + ": node index out of order");
    if (time != f.time) throw ParseError(where + ": time varies within a frame");
    f.positions.emplace_back(cell_to_double(cells[3], where), cell_to_double(cells[4], where),
                             cell_to_double(cells[5], where));
    f.q.emplace_back(cell_to_double(cells[6], where), cell_to_double(cells[7], where),
                     cell_to_double(cells[8], where));
    f.p.emplace_back(cell_to_double(cells[9], where), cell_to_double(cells[10], where),
                     cell_to_double(cells[11], where));
  }
  if (trace.frames.empty()) throw ParseError(path + ": no data rows");
  const std::size_t n0 = trace.frames.front().positions.size();
  for (const TraceFrame& f : trace.frames)
    if (f.positions.size() != n0) throw ParseError(path + ": ragged frames");
  if (trace.frames.size() >= 2) {
    const TraceFrame& a = trace.frames[0];
    const TraceFrame& b = trace.frames[1];
    const std::size_t dstep = b.step - a.step;
    trace.stride = dstep > 0 ? dstep : 1;
    trace.dt = dstep > 0 ? (b.time - a.time) / static_cast<double>(dstep) : 0.0;
  }
  return trace;
}

}  // namespace cosserat
