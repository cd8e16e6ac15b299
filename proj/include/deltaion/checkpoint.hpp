#pragma once

// Plain-text dump of a solved Volterra grid so that oracle scans can resume
// without re-solving finished points.  The layout is documented in
// docs/formats.md; every number is written with 17 significant digits, so a
// write/read round trip is exact.

#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "deltaion/errors.hpp"
#include "deltaion/oracle.hpp"

namespace deltaion {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  VolterraGrid grid;
  std::optional<cplx> p;  ///< survival amplitude at t_final, when it was computed
};

namespace detail {

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline void write_checkpoint(std::ostream& out, const Checkpoint& cp) {
  const auto& g = cp.grid;
  const auto& prm = g.params;
  const auto d = detail::format_double;
  out << "deltaion-checkpoint " << kCheckpointVersion << '\n';
  out << "alpha " << d(prm.alpha) << '\n';
  out << "mu " << d(prm.mu) << '\n';
  out << "omega " << d(prm.omega) << '\n';
  out << "gamma " << d(prm.gamma) << '\n';
  out << "z " << d(prm.z) << '\n';
  out << "h " << d(prm.h) << '\n';
  out << "n_io " << d(prm.n_io) << '\n';
  out << "drive " << d(g.drive) << '\n';
  out << "dt " << d(g.dt) << '\n';
  out << "n_steps " << g.n_steps << '\n';
  out << "t_final " << d(g.t_final) << '\n';
  if (cp.p) {
    out << "p " << d(cp.p->real()) << ' ' << d(cp.p->imag()) << '\n';
  } else {
    out << "p none\n";
  }
  out << "f " << g.f.size() << '\n';
  for (const auto& v : g.f) out << d(v.real()) << ' ' << d(v.imag()) << '\n';
  out << "end\n";
}

inline Checkpoint read_checkpoint(std::istream& in) {
  const auto fail = [](const std::string& what) -> void { throw domain_error("malformed checkpoint: " + what); };
  std::string key;
  int version = 0;
  if (!(in >> key >> version) || key != "deltaion-checkpoint") fail("missing header");
  if (version != kCheckpointVersion) fail("unsupported version " + std::to_string(version));

  const auto expect = [&](const char* name) {
    if (!(in >> key) || key != name) fail(std::string("expected field '") + name + "'");
  };
  const auto read_double = [&](const char* name) {
    expect(name);
    double x = 0.0;
    if (!(in >> x)) fail(std::string("bad value for '") + name + "'");
    return x;
  };

  Checkpoint cp;
  auto& g = cp.grid;
  g.params.alpha = read_double("alpha");
  g.params.mu = read_double("mu");
  g.params.omega = read_double("omega");
  g.params.gamma = read_double("gamma");
  g.params.z = read_double("z");
  g.params.h = read_double("h");
  g.params.n_io = read_double("n_io");
  g.drive = read_double("drive");
  g.dt = read_double("dt");
  expect("n_steps");
  if (!(in >> g.n_steps) || g.n_steps < 1) fail("bad step count");
  g.t_final = read_double("t_final");

  expect("p");
  std::string first;
  if (!(in >> first)) fail("bad value for 'p'");
  if (first != "none") {
    double im = 0.0;
    if (!(in >> im)) fail("bad value for 'p'");
    cp.p = cplx(std::stod(first), im);
  }

  expect("f");
  std::size_t count = 0;
  if (!(in >> count) || count != static_cast<std::size_t>(g.n_steps) + 1) fail("f length does not match n_steps");
  g.f.resize(count);
  for (auto& v : g.f) {
    double re = 0.0;
    double im = 0.0;
    if (!(in >> re >> im)) fail("truncated f array");
    v = cplx(re, im);
  }
  expect("end");
  return cp;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& cp) {
  // Write to a temporary name first so an interrupted run never leaves a
  // truncated file under the final name.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw domain_error("cannot open checkpoint for writing: " + tmp);
    write_checkpoint(out, cp);
    if (!out) throw domain_error("failed writing checkpoint: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw domain_error("cannot move checkpoint into place: " + path);
}

inline std::optional<Checkpoint> load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  return read_checkpoint(in);
}

}  // namespace deltaion
