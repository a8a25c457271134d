// Acceptance driver: one PASS/FAIL line per criterion.
// usage: acceptance [work_dir]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "commands.hpp"
#include "json.hpp"
#include "stablenorm/convex_poly.hpp"
#include "stablenorm/geodesic_lab.hpp"
#include "stablenorm/homology_shortest.hpp"
#include "stablenorm/lattice.hpp"
#include "stablenorm/quasinorm.hpp"
#include "stablenorm/space_io.hpp"
#include "stablenorm/splitting.hpp"
#include "stablenorm/stable_norm.hpp"

namespace fs = std::filesystem;
using namespace sn;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

// (value, N(z), D) triples collected by criteria 3 and 4 for criterion 5
struct SandwichSample {
  std::string where;
  IVec z;
  double value, n_z, D;
  bool certified;
};
std::vector<SandwichSample> g_sandwich;
bool g_c4_ran = false, g_c3_ran = false;
fs::path g_work;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

IVec parse_ivec(const std::string& s) {
  IVec v;
  std::istringstream is(s);
  long long x;
  while (is >> x) v.push_back(x);
  return v;
}

double l1(const IVec& z) {
  double s = 0;
  for (auto c : z) s += std::fabs(double(c));
  return s;
}

std::vector<IVec> canonical_primitive(int rank, int radius) {
  std::set<IVec> out;
  for (const auto& d : default_directions(rank, radius)) {
    IVec m = d;
    for (auto& c : m) c = -c;
    out.insert(std::max(d, m));  // one representative per +- pair
  }
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------- 1
Outcome c1() {
  Outcome o;
  for (int n = 2; n <= 6; ++n) {
    auto p = cross_polytope(n);
    long long V = (long long)p.vertices.size(), E = (long long)p.edges.size();
    if (V != 2 * n || E != 2LL * n * (n - 1))
      o.fail("n=" + std::to_string(n) + " V=" + std::to_string(V) + " E=" + std::to_string(E));
    if (n == 3 && V / 2 + E != 15) o.fail("n=3 V/2+E=" + std::to_string(V / 2 + E));
    if (n == 3 && edge_vertex_bound(3) != 15) o.fail("bound(3)=" + std::to_string(edge_vertex_bound(3)));
  }
  if (o.pass) o.detail = "n=2..6 exact, V/2+E=15 at n=3";
  return o;
}

// ---------------------------------------------------------------- 2
Outcome c2() {
  Outcome o;
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<int> extra(0, 8);
  long long checked = 0, violations = 0;
  for (int n = 2; n <= 5; ++n)
    for (int i = 0; i < 1000; ++i) {
      auto p = hull_symmetric_int(random_symmetric_points(n, n + extra(rng), rng));
      auto r = check_bound(p);
      ++checked;
      if (!r.satisfied) {
        ++violations;
        o.fail("rank " + std::to_string(n) + ": V/2+E=" + std::to_string(r.half_V_plus_E) + " < " +
               std::to_string(r.bound));
      }
    }
  if (o.pass) o.detail = std::to_string(checked) + " hulls, 0 violations";
  return o;
}

// ---------------------------------------------------------------- 3
Outcome c3() {
  Outcome o;
  auto s = build_flat_torus(2, 32);
  HomologySolver solver(s);
  auto led = derive_ledger(solver);
  auto dirs = canonical_primitive(2, 3);
  if (dirs.size() != 16) o.fail(std::to_string(dirs.size()) + " directions, expected 16");
  double worst = 0;
  for (const auto& z : dirs) {
    auto e = stable_norm_of(solver, led, z);
    double euc = std::hypot(double(z[0]), double(z[1]));
    double rel = std::fabs(e.value - euc) / euc;
    worst = std::max(worst, rel);
    if (rel > 0.03) o.fail("(" + format_vec(z) + ") rel error " + std::to_string(rel));
    g_sandwich.push_back({"flat", z, e.value, e.n_z, led.D, e.n_z_certified});
  }
  g_c3_ran = true;
  if (o.pass) o.detail = std::to_string(dirs.size()) + " directions, max rel error " + std::to_string(worst);
  return o;
}

// ---------------------------------------------------------------- 4
Outcome c4() {
  Outcome o;
  fs::path dir = g_work / "hedlund";
  fs::remove_all(dir);
  fs::create_directories(dir);
  RunConfig cfg;
  cfg.command = "build";
  cfg.spec_path = std::string(SN_DATA_DIR) + "/hedlund_t3.yaml";
  cfg.out_dir = dir.string();
  std::ostringstream build_out;
  if (cli::cmd_build(cfg, {}, build_out) != cli::kOk) {
    o.fail("build failed: " + build_out.str());
    return o;
  }
  cfg.command = "stable-ball";
  cfg.spec_path.clear();
  cfg.space_path = (dir / cli::kSpaceFile).string();
  cfg.radius = 1;
  std::ostringstream ball_out;
  int rc = cli::cmd_stable_ball(cfg, ball_out);
  std::ofstream(dir / "stable_ball.out") << ball_out.str();
  if (rc != cli::kOk) o.fail("stable-ball exit " + std::to_string(rc));
  const std::string txt = ball_out.str();
  if (txt.find("V=6 E=12 V/2+E=15") == std::string::npos) o.fail("hull is not V=6 E=12");
  if (txt.find("lower bound: at least 15 minimal geodesics") == std::string::npos) o.fail("lower bound 15 not printed");

  auto led = parse_ledger(read_file(cfg.space_path + ".ledger"));
  int rows = 0;
  double worst = 0;
  for (const auto& line : split(read_file((dir / cli::kEstimatesCsv).string()), '\n')) {
    if (line.empty() || line[0] == '#' || line.rfind("direction", 0) == 0) continue;
    auto f = split(line, ',');
    IVec z = parse_ivec(f.at(0));
    double value = std::stod(f.at(1)), n_z = std::stod(f.at(4));
    bool cert = f.at(6) == "1";
    double rel = std::fabs(value - l1(z)) / l1(z);
    worst = std::max(worst, rel);
    if (rel > 0.10) o.fail("(" + format_vec(z) + ") rel error " + std::to_string(rel));
    g_sandwich.push_back({"hedlund", z, value, n_z, led.D, cert});
    ++rows;
  }
  if (rows != 13) o.fail(std::to_string(rows) + " directions, expected 13");
  g_c4_ran = true;
  if (o.pass)
    o.detail = std::to_string(rows) + " directions, max rel error vs l1 " + std::to_string(worst) +
               ", V=6 E=12, lower bound 15";
  return o;
}

// ---------------------------------------------------------------- 5
Outcome c5() {
  Outcome o;
  if (!g_c3_ran || !g_c4_ran) o.fail("criteria 3 and 4 did not both produce estimates");
  size_t uncertified = 0;
  for (const auto& s : g_sandwich) {
    if (!s.certified) ++uncertified;
    if (!(s.value <= s.n_z && s.n_z <= s.value + s.D))
      o.fail(s.where + " (" + format_vec(s.z) + "): value=" + std::to_string(s.value) +
             " N=" + std::to_string(s.n_z) + " D=" + std::to_string(s.D));
  }
  if (o.pass)
    o.detail = std::to_string(g_sandwich.size()) + " classes, 0 violations (" + std::to_string(uncertified) +
               " with N an upper bound)";
  return o;
}

// ---------------------------------------------------------------- 6
Outcome c6() {
  Outcome o;
  std::mt19937_64 rng(606);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> nv(3, 10);
  int runs = 0, certified = 0;
  for (int b : {2, 3})
    for (int i = 0; i < 100; ++i) {
      std::vector<RVec> pts(nv(rng), RVec(b));
      for (auto& p : pts)
        for (auto& c : p) c = g(rng);
      auto part = split_path(polyline_path(pts));
      ++runs;
      if (!part.certified) continue;
      ++certified;
      if (part.residual > 1e-6) o.fail("residual " + std::to_string(part.residual));
      if (part.d > (b + 1) / 2) o.fail("d=" + std::to_string(part.d) + " in rank " + std::to_string(b));
    }
  double rate = double(certified) / runs;
  if (rate < 0.95) o.fail("certification rate " + std::to_string(rate));

  auto s = build_flat_torus(2, 8);
  HomologySolver solver(s);
  double half_err = 0;
  for (IVec z : {IVec{2, 0}, IVec{2, 2}, IVec{4, 2}, IVec{3, 1}}) {
    auto r = solver.minimal_length(z);
    auto part = split_loop_with_basepoint(s, r.loop);
    if (!part.certified) {
      o.fail("loop of class (" + format_vec(z) + ") not certified");
      continue;
    }
    for (int k = 0; k < 2; ++k) half_err = std::max(half_err, std::fabs(part.half[k] - z[k] / 2.0));
  }
  if (half_err > 1e-6) o.fail("half-class error " + std::to_string(half_err));
  if (o.pass)
    o.detail = std::to_string(certified) + "/" + std::to_string(runs) + " certified, half-class error " +
               std::to_string(half_err);
  return o;
}

// ---------------------------------------------------------------- 7
// number of runs of equal tokens, and whether the runs use distinct highways
std::pair<int, bool> run_shape(const std::string& symbols) {
  std::vector<std::string> runs;
  std::istringstream is(symbols);
  std::string tok;
  while (is >> tok)
    if (runs.empty() || runs.back() != tok) runs.push_back(tok);
  std::set<std::string> hw;
  for (auto r : runs) hw.insert(r[0] == '~' ? r.substr(1) : r);
  return {(int)runs.size(), hw.size() == runs.size()};
}

Outcome c7() {
  Outcome o;
  if (!g_c4_ran) {
    o.fail("needs the criterion 4 output");
    return o;
  }
  fs::path dir = g_work / "hedlund";
  RunConfig cfg;
  cfg.command = "classify";
  cfg.space_path = (dir / cli::kSpaceFile).string();
  cfg.spec_path = std::string(SN_DATA_DIR) + "/hedlund_t3.yaml";
  cfg.out_dir = dir.string();
  std::ostringstream out;
  int rc = cli::cmd_classify(cfg, out);
  std::ofstream(dir / "classify.out") << out.str();
  if (rc != cli::kOk) {
    o.fail("classify exit " + std::to_string(rc) + ": " + out.str().substr(0, 200));
    return o;
  }
  int edge_rays = 0, edge_refused = 0, edge_nonhomoclinic = 0, vertex_homoclinic = 0, vertex_rays = 0;
  int two_run = 0;
  for (const auto& line : split(read_file((dir / cli::kClassifyRecords).string()), '\n')) {
    if (line.empty() || line[0] == '#') continue;
    auto rec = nlohmann::json::parse(line);
    std::set<std::string> labels;
    for (const auto& l : rec["labels"]) labels.insert(l.get<std::string>());
    bool refused = rec["refused"].get<bool>();
    std::string sym = rec["symbols"].get<std::string>();
    if (rec["kind"] == "vertex") {
      ++vertex_rays;
      if (!refused && labels.count("homoclinic")) {
        ++vertex_homoclinic;
        if (run_shape(sym).first != 1) o.fail(rec["ray"].get<std::string>() + " symbols not a single run: " + sym);
      }
    } else {
      ++edge_rays;
      if (refused) {
        ++edge_refused;
        continue;
      }
      if (rec["converged"].get<bool>() && !labels.count("homoclinic")) {
        ++edge_nonhomoclinic;
        auto [nruns, distinct] = run_shape(sym);
        if (nruns == 2 && distinct)
          ++two_run;
        else
          o.fail(rec["ray"].get<std::string>() + " symbols not a two-highway shape: " + sym);
      }
    }
  }
  if (edge_rays != 24) o.fail(std::to_string(edge_rays) + " edge rays, expected 24");
  if (edge_nonhomoclinic < 12) o.fail(std::to_string(edge_nonhomoclinic) + " converged non-homoclinic edge rays");
  if (vertex_rays != 3 || vertex_homoclinic != 3) o.fail(std::to_string(vertex_homoclinic) + " homoclinic highway rays");
  double refusal = edge_rays ? double(edge_refused) / edge_rays : 1.0;
  if (refusal > 0.25) o.fail("refusal rate " + std::to_string(refusal));
  if (o.pass)
    o.detail = std::to_string(edge_nonhomoclinic) + " non-homoclinic edge rays (" + std::to_string(two_run) +
               " two-highway symbol shapes), " + std::to_string(vertex_homoclinic) + " homoclinic, refused " +
               std::to_string(edge_refused) + "/" + std::to_string(edge_rays);
  return o;
}

// ---------------------------------------------------------------- 8
Outcome c8() {
  Outcome o;
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst_dev = 0;
  for (int n : {2, 3}) {
    auto flat = constant_metric(n, 1.0);
    for (int i = 0; i < 5; ++i) {
      RVec x0(n), d(n);
      for (auto& c : x0) c = u(rng);
      for (auto& c : d) c = u(rng);
      auto tr = integrate_geodesic(flat, x0, d, 100.0);
      double nd = norm_l2(d);
      if (tr.t_max() < 100.0 - 1e-9) o.fail("trace stopped at " + std::to_string(tr.t_max()));
      for (size_t k = 0; k < tr.t.size(); ++k)
        for (int c = 0; c < n; ++c)
          worst_dev = std::max(worst_dev, std::fabs(tr.pos[k][c] - x0[c] - tr.t[k] * d[c] / nd));
    }
  }
  if (worst_dev > 1e-6) o.fail("flat deviation " + std::to_string(worst_dev));
  auto hed = hedlund_smooth_metric(example_axis_highways(3));
  double worst_drift = 0;
  for (int i = 0; i < 4; ++i) {
    RVec x0{u(rng), u(rng), u(rng)}, d{u(rng), u(rng), u(rng)};
    auto tr = integrate_geodesic(hed, x0, d, 20.0);
    worst_drift = std::max(worst_drift, tr.max_drift_rate);
  }
  if (worst_drift > 1e-6) o.fail("drift rate " + std::to_string(worst_drift));
  if (o.pass) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "flat deviation %.2e, Hedlund drift %.2e per unit time", worst_dev, worst_drift);
    o.detail = buf;
  }
  return o;
}

// ---------------------------------------------------------------- 9
Outcome c9() {
  Outcome o;
  std::mt19937_64 rng(909);
  size_t pairs_checked = 0;
  // flat T^2 with the default stencil; T^3 with the 26-neighbour stencil
  for (auto [n, res, stencil] : {std::tuple{2, 16, 2}, std::tuple{3, 4, 1}}) {
    auto s = build_flat_torus(n, res, stencil);
    HomologySolver solver(s);
    double diam = quotient_diameter(s);
    auto rep = verify_quasinorm_axioms(graph_quasinorm(solver, 2 * diam), random_pairs(n, 3, 200, rng));
    pairs_checked += rep.pairs_checked;
    if (!rep.ok())
      o.fail("rank " + std::to_string(n) + ": " + rep.violations.front().axiom + " violated");
  }
  WordNorm w({{1, 0}, {0, 1}});
  auto qn = w.as_quasinorm();
  std::uniform_int_distribution<int> c(-25, 25);
  int exact = 0;
  for (int i = 0; i < 50; ++i) {
    IVec z{c(rng), c(rng)};
    if (z[0] == 0 && z[1] == 0) z[0] = 1;
    auto h = homogenize(qn, z, 1e-12, 16);
    if (h.value == l1(z))
      ++exact;
    else
      o.fail("(" + format_vec(z) + ") homogenized " + std::to_string(h.value));
  }
  if (o.pass)
    o.detail = std::to_string(pairs_checked) + " pairs with delta=2 diam, " + std::to_string(exact) +
               "/50 word-norm classes exact";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  g_work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "stablenorm_acceptance";
  fs::create_directories(g_work);
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "cross-polytope table", 1, c1},
      {2, "bound suite", 120, c2},
      {3, "flat torus stable norm", 60, c3},
      {4, "Hedlund l1 ball", 600, c4},
      {5, "sandwich", 1e9, c5},
      {6, "splitting suite", 60, c6},
      {7, "Hedlund classification", 1200, c7},
      {8, "integrator fidelity", 60, c8},
      {9, "quasi-norm suite", 30, c9},
  };
  int failed = 0;
  for (const auto& c : all) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_s) o.fail("runtime " + std::to_string(secs) + " s over " + std::to_string(c.limit_s) + " s");
    char t[32];
    std::snprintf(t, sizeof t, "%.1f s", secs);
    std::printf("criterion %d (%s): %s  %s  [%s]\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), t);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", int(all.size()) - failed, all.size());
  return failed ? 1 : 0;
}
