#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "stablenorm/convex_poly.hpp"
#include "stablenorm/geodesic_lab.hpp"
#include "stablenorm/homology_shortest.hpp"
#include "stablenorm/quasinorm.hpp"
#include "stablenorm/space_io.hpp"
#include "stablenorm/splitting.hpp"
#include "stablenorm/stable_norm.hpp"

namespace sn::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kStableTol = 1e-2;
constexpr double kClassifyTol = 0.05;

fs::path out_path(const RunConfig& cfg, const std::string& name) {
  fs::path dir = default_out_dir(cfg.out_dir);
  fs::create_directories(dir);
  return dir / name;
}

std::string read_input(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("no such file: " + path);
  return read_file(path);
}

PeriodicSpace load_space(const RunConfig& cfg) {
  if (cfg.space_path.empty()) throw UsageError("--space is required");
  try {
    return parse_space(read_input(cfg.space_path));
  } catch (const ParseError& e) {
    throw UsageError(cfg.space_path + ": " + e.what());
  }
}

ConstantsLedger load_ledger(const RunConfig& cfg, HomologySolver& solver, std::ostream& out) {
  std::string side = cfg.space_path + ".ledger";
  if (fs::exists(side)) {
    int rank = 0;
    ConstantsLedger l;
    try {
      l = parse_ledger(read_file(side), &rank);
    } catch (const ParseError& e) {
      throw UsageError(side + ": " + e.what());
    }
    if (rank != solver.space().rank()) throw UsageError(side + ": rank does not match the space");
    return l;
  }
  out << "note: no ledger sidecar, deriving constants\n";
  return derive_ledger(solver);
}

std::string ledger_line(const ConstantsLedger& l) {
  std::ostringstream os;
  os.precision(6);
  os << "ledger: diam=" << l.diam << " J=" << l.J << " K=" << l.K << " D=" << l.D << " (K from " << l.k_points
     << " lattice points" << (l.k_certified ? "" : ", upper bound") << ")";
  return os.str();
}

// key value lines
std::map<std::string, std::string> read_report(const std::string& path) {
  std::map<std::string, std::string> m;
  std::istringstream is(read_input(path));
  for (std::string line; std::getline(is, line);) {
    if (line.empty() || line[0] == '#') continue;
    auto sp = line.find(' ');
    if (sp == std::string::npos) continue;
    m[line.substr(0, sp)] = line.substr(sp + 1);
  }
  return m;
}

std::string vec_str(const RVec& v) { return format_vec(v, ' ', 6); }

json vec_json(const RVec& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

double seg_distance(const RVec& p, const RVec& a, const RVec& b) {
  RVec d(a.size()), w(a.size());
  for (size_t i = 0; i < a.size(); ++i) d[i] = b[i] - a[i], w[i] = p[i] - a[i];
  double t = std::clamp(dot(w, d) / dot(d, d), 0.0, 1.0);
  for (size_t i = 0; i < a.size(); ++i) w[i] -= t * d[i];
  return norm_l2(w);
}

int default_radius(int rank) { return rank == 2 ? 3 : rank == 3 ? 2 : 1; }

}  // namespace

// ---------------------------------------------------------------- build

int cmd_build(const RunConfig& cfg, const std::vector<std::string>& args, std::ostream& out) {
  BuilderConfig bc;
  if (!cfg.spec_path.empty()) {
    if (!args.empty()) throw UsageError("build: give either --spec or positional arguments");
    try {
      bc = parse_builder_yaml(read_input(cfg.spec_path));
    } catch (const ParseError& e) {
      throw UsageError(cfg.spec_path + ": " + e.what());
    }
  } else {
    if (args.size() != 3 || args[0] != "flat") throw UsageError("build: expected 'flat <n> <resolution>' or --spec");
    bc.builder = "flat";
    try {
      bc.n = std::stoi(args[1]);
      bc.resolution = std::stoi(args[2]);
    } catch (const std::exception&) {
      throw UsageError("build: n and resolution must be integers");
    }
  }
  if (cfg.resolution > 0) bc.resolution = cfg.resolution;
  if (bc.resolution < 1) throw UsageError("build: resolution missing (--resolution)");
  PeriodicSpace s = build_from_config(bc);
  HomologySolver solver(s);
  ConstantsLedger led = derive_ledger(solver);
  std::string space_file = out_path(cfg, kSpaceFile).string();
  write_file(space_file, output_header(cfg, "space") + serialize_space(s));
  write_file(space_file + ".ledger", output_header(cfg, "ledger") + serialize_ledger(led, s.rank()));
  write_file(out_path(cfg, kBuilderFile).string(), output_header(cfg, "builder") + builder_yaml(bc));
  out << "space: " << s.num_vertices() << " vertices, " << s.num_edges() / 2 << " edges, rank " << s.rank() << "\n";
  out << ledger_line(led) << "\n";
  out << "wrote " << space_file << " and its .ledger sidecar\n";
  return kOk;
}

// ---------------------------------------------------------------- stable ball

int cmd_stable_ball(const RunConfig& cfg, std::ostream& out) {
  PeriodicSpace s = load_space(cfg);
  const int b = s.rank();
  if (b < 2) {
    out << "refused: rank-" << b << " space is degenerate for hull analysis\n";
    return kFailure;
  }
  HomologySolver solver(s);
  ConstantsLedger led = load_ledger(cfg, solver, out);
  out << ledger_line(led) << "\n";
  const int R = cfg.radius > 0 ? cfg.radius : default_radius(b);
  StableOptions opt;
  opt.tol = cfg.tol > 0 ? cfg.tol : kStableTol;
  BallCloud cloud;
  cloud.rank = b;
  auto dirs = default_directions(b, R);
  std::string csv_file = out_path(cfg, kBallCsv).string();
  std::vector<StableNormEstimate> estimates;
  auto sorted_cloud = [&] {
    BallCloud c = cloud;
    std::sort(c.points.begin(), c.points.end(),
              [](const BallPoint& a, const BallPoint& q) { return a.direction < q.direction; });
    return c;
  };
  for (const auto& d : dirs) {
    try {
      BallCloud one = sample_ball(solver, led, {d}, opt, &estimates);
      cloud.points.insert(cloud.points.end(), one.points.begin(), one.points.end());
    } catch (const std::exception& e) {
      write_file(csv_file, output_header(cfg, "ball cloud (partial)") + ball_cloud_csv(sorted_cloud()));
      out << "error: estimate for (" << format_vec(d) << ") failed: " << e.what() << "\n";
      out << "partial cloud kept in " << csv_file << "\n";
      return kFailure;
    }
  }
  cloud = sorted_cloud();
  write_file(csv_file, output_header(cfg, "ball cloud") + ball_cloud_csv(cloud));
  write_file(out_path(cfg, kEstimatesCsv).string(), output_header(cfg, "estimates") + estimates_csv(estimates));
  size_t flagged = 0;
  double merge_tol = opt.tol;
  for (const auto& p : cloud.points) {
    if (p.hi - p.lo > opt.tol * p.value) ++flagged;
    merge_tol = std::max(merge_tol, p.error_radius);
  }
  SymPolytope hull = merge_by_tolerance(cloud_hull(cloud), merge_tol);
  // saturation: some samples are not vertices, and a coarser sampling gives the
  // same vertex count
  bool polytope_like = hull.vertices.size() < cloud.points.size();
  long long v_sub = -1;
  if (R >= 2) {
    BallCloud sub;
    sub.rank = b;
    for (const auto& p : cloud.points)
      if (std::all_of(p.direction.begin(), p.direction.end(), [&](long long c) { return std::llabs(c) <= R - 1; }))
        sub.points.push_back(p);
    try {
      v_sub = (long long)merge_by_tolerance(cloud_hull(sub), merge_tol).vertices.size();
    } catch (const std::invalid_argument&) {
      v_sub = -1;  // coarse sampling does not span
    }
    polytope_like = polytope_like && v_sub == (long long)hull.vertices.size();
  }
  BoundReport rep = check_bound(hull);
  write_file(out_path(cfg, kHullFile).string(), output_header(cfg, "hull") + serialize_polytope(hull));
  write_file(out_path(cfg, kBoundCsv).string(),
             output_header(cfg, "bound") + bound_csv_header() + "\n" + bound_csv_row(rep) + "\n");
  std::ostringstream r;
  r << output_header(cfg, "ball report") << "rank " << b << "\nradius " << R << "\ndirections " << dirs.size()
    << "\ncloud_points " << cloud.points.size() << "\nflagged " << flagged << "\nmerge_tol "
    << format_vec(RVec{merge_tol}) << "\nV " << rep.V << "\nE " << rep.E << "\nF " << hull.facets.size()
    << "\nhalf_V_plus_E " << rep.half_V_plus_E << "\nbound " << rep.bound << "\nsatisfied " << rep.satisfied
    << "\nV_coarse " << v_sub << "\npolytope_like " << polytope_like << "\n";
  write_file(out_path(cfg, kBallReport).string(), r.str());

  out << "cloud: " << cloud.points.size() << " points from " << dirs.size() << " directions (sup-norm <= " << R
      << ")";
  if (flagged) out << ", " << flagged << " with band wider than tol";
  out << "\n";
  out << "V=" << rep.V << " E=" << rep.E << " V/2+E=" << rep.half_V_plus_E << "\n";
  out << "bound min(b^2+2b+1, 2b^2-b) = " << rep.bound << (rep.satisfied ? ": satisfied" : ": VIOLATED") << "\n";
  if (polytope_like) {
    out << "lower bound: at least " << rep.half_V_plus_E << " minimal geodesics (at least " << rep.bound
        << " for any polytope ball of rank " << b << ")\n";
  } else {
    out << "hull flagged not polytope-like (" << hull.vertices.size() << " vertices from " << cloud.points.size()
        << " samples";
    if (v_sub >= 0) out << ", " << v_sub << " at radius " << R - 1;
    out << ")\n";
  }
  return rep.satisfied ? kOk : kFailure;
}

// ---------------------------------------------------------------- classify

namespace {

struct RayRow {
  std::string id, kind;
  int edge = -1;
  std::string sign;
  RVec z;
  bool converged = false;
  GeodesicClassification cls;
  AsymptoteSet asym;
  bool have_asym = false;
  std::string symbols;
  std::string note;
  bool containment = true;
  bool convjoin = true;
  std::string transcript;
};

std::string transcript_of(const EdgeRay& r, const std::string& id) {
  std::ostringstream os;
  os << "ray " << id << " edge " << r.edge_id << " z " << vec_str(r.z) << " eta " << vec_str(r.eta) << " ell "
     << r.ell << "\n";
  for (const auto& st : r.log)
    os << "  i " << st.i << " z_i " << format_vec(st.z_i) << " lambda " << format_vec(RVec{st.lambda}, ' ', 9)
       << " ell " << r.ell << " shift " << st.shift << " length " << format_vec(RVec{st.length}, ' ', 9)
       << " certified " << st.certified << "\n";
  os << "  window back " << format_vec(RVec{r.backward_length}, ' ', 9) << " forward "
     << format_vec(RVec{r.forward_length}, ' ', 9) << (r.converged ? " converged" : " not converged") << "\n";
  return os.str();
}

}  // namespace

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
  PeriodicSpace s = load_space(cfg);
  const int b = s.rank();
  auto rep = read_report(out_path(cfg, kBallReport).string());
  if (rep["polytope_like"] != "1") {
    out << "refused: the stable ball hull is not polytope-like; classification runs in polytope mode only\n";
    return kFailure;
  }
  SymPolytope poly = parse_polytope(read_input(out_path(cfg, kHullFile).string()));
  if (poly.n != b) throw UsageError("hull rank does not match the space");
  BallCloud cloud = parse_ball_cloud_csv(read_input(out_path(cfg, kBallCsv).string()));
  ConstantsLedger led;
  {
    HomologySolver solver(s);
    led = load_ledger(cfg, solver, out);
  }
  const double tol = cfg.tol > 0 ? cfg.tol : kClassifyTol;

  // symbols need the highway layout
  std::optional<HedlundSpec> spec;
  std::string spec_file = cfg.spec_path;
  if (spec_file.empty()) {
    fs::path p = fs::path(cfg.space_path).parent_path() / kBuilderFile;
    if (fs::exists(p)) spec_file = p.string();
  }
  if (!spec_file.empty()) {
    try {
      BuilderConfig bc = parse_builder_yaml(read_input(spec_file));
      if (bc.builder == "hedlund") spec = bc.hedlund;
    } catch (const ParseError& e) {
      throw UsageError(spec_file + ": " + e.what());
    }
  }

  std::vector<double> H = cfg.horizons.empty() ? default_horizons(1.0) : cfg.horizons;
  EdgeRayOptions eopt;
  eopt.depth = cfg.depth;
  eopt.horizons = H;
  eopt.min_window = H.back();

  // jobs: one per +- vertex pair, one per edge
  std::vector<int> vertex_jobs;
  for (int v = 0; v < (int)poly.vertices.size(); ++v)
    if (v < poly.antipode[v]) vertex_jobs.push_back(v);
  const size_t njobs = vertex_jobs.size() + poly.edges.size();
  std::vector<std::vector<RayRow>> results(njobs);

  auto finish = [&](RayRow& row, const GeodesicTrace& tr) {
    row.asym = asymptotes(tr, H, tol);
    row.have_asym = true;
    row.convjoin = mixed_in_convjoin(row.asym, tol);
    if (spec) row.symbols = symbol_string(symbol_sequence(tr, *spec));
  };

  auto run_vertex = [&](int v, std::vector<RayRow>& rows) {
    HomologySolver solver(s);
    RayRow row;
    row.kind = "vertex";
    row.id = "v" + std::to_string(v);
    // the cloud direction closest to the vertex
    const BallPoint* best = nullptr;
    double bd = INFINITY;
    for (const auto& p : cloud.points) {
      double d = 0;
      for (int k = 0; k < b; ++k) d += std::pow(p.point[k] - poly.vertices[v][k], 2);
      if (d < bd) bd = d, best = &p;
    }
    row.z = poly.vertices[v];
    auto r = solver.minimal_length(best->direction, &led);
    int reps = int(std::ceil(H.back() / r.length)) + 2;
    GeodesicTrace tr = periodic_trace(s, r.loop, reps);
    row.converged = true;
    finish(row, tr);
    row.cls = classify(row.asym, poly, tol);
    row.note = "closed minimal loop of class (" + format_vec(best->direction) + ")";
    rows.push_back(std::move(row));
  };

  auto run_edge = [&](int e, std::vector<RayRow>& rows) {
    HomologySolver solver(s);
    EdgePair pair = construct_edge_pair(solver, led, poly, e, eopt, tol);
    int k = 0;
    for (auto [ray, cl] : {std::pair{&pair.a, &pair.ca}, std::pair{&pair.b, &pair.cb}}) {
      RayRow row;
      row.kind = "edge";
      row.edge = e;
      row.sign = k == 0 ? "+" : (pair.used_fallback ? "-fallback" : "-");
      row.id = "e" + std::to_string(e) + (k == 0 ? "+" : "-");
      row.z = ray->z;
      row.converged = ray->converged;
      row.cls = *cl;
      row.note = ray->note;
      row.transcript = transcript_of(*ray, row.id);
      if (ray->converged) {
        finish(row, ray->trace);
        // plus points near [z, y], minus points near [x, z]
        for (const auto& p : row.asym.plus)
          row.containment = row.containment && seg_distance(p.v, ray->z, ray->y) <= tol + p.radius;
        for (const auto& p : row.asym.minus)
          row.containment = row.containment && seg_distance(p.v, ray->x, ray->z) <= tol + p.radius;
      }
      rows.push_back(std::move(row));
      ++k;
    }
  };

  // workers pull jobs by index; every job has its own solver, so results do not
  // depend on scheduling
  std::mutex mu;
  size_t next = 0;
  std::string first_error;
  auto worker = [&] {
    for (;;) {
      size_t j;
      {
        std::lock_guard<std::mutex> g(mu);
        if (next >= njobs || !first_error.empty()) return;
        j = next++;
      }
      try {
        if (j < vertex_jobs.size())
          run_vertex(vertex_jobs[j], results[j]);
        else
          run_edge(int(j - vertex_jobs.size()), results[j]);
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> g(mu);
        if (first_error.empty()) first_error = ex.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < std::max(1, cfg.workers); ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (!first_error.empty()) {
    out << "error: " << first_error << "\n";
    return kFailure;
  }

  std::ostringstream csv, jsonl, log;
  csv << output_header(cfg, "classification")
      << "ray,kind,edge,sign,z,converged,labels,plus,minus,sphere_defect,symbols,note\n";
  jsonl << output_header(cfg, "classification records");
  log << output_header(cfg, "construction transcript");
  size_t homoclinic = 0, non_homoclinic = 0, refused = 0, total = 0;
  for (const auto& rows : results)
    for (const auto& row : rows) {
      ++total;
      bool ref = row.cls.refused;
      if (ref)
        ++refused;
      else if (row.cls.homoclinic)
        ++homoclinic;
      else
        ++non_homoclinic;
      auto pts = [](const std::vector<AsymptotePoint>& v) {
        std::string o;
        for (const auto& p : v) o += (o.empty() ? "" : "|") + vec_str(p.v);
        return o;
      };
      std::string labels = ref ? "refused" : "";
      for (const auto& l : row.cls.labels) labels += (labels.empty() ? "" : ";") + l;
      csv << row.id << ',' << row.kind << ',' << row.edge << ',' << row.sign << ',' << vec_str(row.z) << ','
          << row.converged << ',' << labels << ',' << (row.have_asym ? pts(row.asym.plus) : "") << ','
          << (row.have_asym ? pts(row.asym.minus) : "") << ',' << format_vec(RVec{row.cls.sphere_defect}, ' ', 6)
          << ',' << row.symbols << ',' << (ref ? row.cls.reason : row.note) << '\n';
      json rec;
      rec["ray"] = row.id;
      rec["kind"] = row.kind;
      rec["edge"] = row.edge;
      rec["sign"] = row.sign;
      rec["z"] = vec_json(row.z);
      rec["converged"] = row.converged;
      rec["refused"] = ref;
      if (ref) rec["reason"] = row.cls.reason;
      rec["labels"] = row.cls.labels;
      json wit;
      if (row.have_asym) {
        for (const auto* set : {&row.asym.plus, &row.asym.minus}) {
          json a = json::array();
          for (const auto& p : *set) a.push_back({{"point", vec_json(p.v)}, {"radius", p.radius}});
          wit[set == &row.asym.plus ? "plus" : "minus"] = a;
        }
        json ps = json::array(), ms = json::array();
        for (const auto& p : row.asym.plus_samples) ps.push_back(vec_json(p));
        for (const auto& p : row.asym.minus_samples) ms.push_back(vec_json(p));
        wit["plus_samples"] = ps;
        wit["minus_samples"] = ms;
      }
      wit["plus_vertex"] = row.cls.plus_vertex;
      wit["minus_vertex"] = row.cls.minus_vertex;
      wit["sphere_defect"] = row.cls.sphere_defect;
      wit["mixed_in_convjoin"] = row.convjoin;
      if (row.kind == "edge") wit["edge_containment"] = row.containment;
      rec["witnesses"] = wit;
      rec["tolerances"] = {{"cluster", tol}, {"horizons", H}};
      rec["symbols"] = row.symbols;
      jsonl << rec.dump() << '\n';
      log << row.transcript;
    }
  write_file(out_path(cfg, kClassifyCsv).string(), csv.str());
  write_file(out_path(cfg, kClassifyRecords).string(), jsonl.str());
  write_file(out_path(cfg, kTranscript).string(), log.str());

  for (const auto& rows : results)
    for (const auto& row : rows) {
      out << row.id << "  " << (row.cls.refused ? "refused (" + row.cls.reason + ")" : row.cls.summary());
      if (!row.symbols.empty()) out << "  [" << row.symbols << "]";
      out << "\n";
    }
  out << "rays " << total << ": homoclinic " << homoclinic << ", non-homoclinic " << non_homoclinic << ", refused "
      << refused << "\n";
  long long E = (long long)poly.edges.size(), V = (long long)poly.vertices.size();
  out << "comparison: V/2=" << V / 2 << " E=" << E << " non-homoclinic=" << non_homoclinic
      << (non_homoclinic >= (size_t)E ? " (>= E)" : " (< E)") << " homoclinic=" << homoclinic
      << (homoclinic >= (size_t)(V / 2) ? " (>= V/2)" : " (< V/2)") << "\n";
  return kOk;
}

// ---------------------------------------------------------------- selftest

int cmd_selftest(const RunConfig& cfg, std::ostream& out) {
  const int iters = cfg.iterations < 0 ? 20 : cfg.iterations;
  if (iters == 0) {
    out << "selftest: no tests run (zero iterations)\n";
    return kFailure;
  }
  struct Suite {
    std::string name;
    size_t cases = 0, failures = 0;
    std::string detail;
  };
  std::vector<Suite> suites;
  std::mt19937_64 rng(cfg.seed);

  {  // quasi-norm axioms: word norm and a small flat graph
    Suite st;
    st.name = "axioms";
    WordNorm w({{1, 0}, {0, 1}});
    auto pairs = random_pairs(2, 6, iters, rng);
    auto rw = verify_quasinorm_axioms(w.as_quasinorm(), pairs);
    PeriodicSpace s = build_flat_torus(2, 8);
    HomologySolver solver(s);
    double diam = quotient_diameter(s);
    auto rg = verify_quasinorm_axioms(graph_quasinorm(solver, 2 * diam), random_pairs(2, 3, iters, rng));
    st.cases = rw.pairs_checked + rg.pairs_checked;
    st.failures = rw.violations.size() + rg.violations.size();
    if (st.failures) st.detail = "first violation: " + (rw.ok() ? rg : rw).violations.front().axiom;
    suites.push_back(st);
  }
  {  // splitting residuals
    Suite st;
    st.name = "splitting";
    std::normal_distribution<double> g;
    for (int b : {2, 3})
      for (int i = 0; i < iters; ++i) {
        std::vector<RVec> pts(6, RVec(b));
        for (auto& p : pts)
          for (auto& c : p) c = g(rng);
        auto part = split_path(polyline_path(pts));
        ++st.cases;
        if (!part.certified || part.residual > 1e-6 || part.d > (b + 1) / 2) {
          ++st.failures;
          if (st.detail.empty()) st.detail = "rank " + std::to_string(b) + " residual " + std::to_string(part.residual);
        }
      }
    suites.push_back(st);
  }
  {  // polytope bounds
    Suite st;
    st.name = "bounds";
    std::uniform_int_distribution<int> extra(0, 8);
    for (int n = 2; n <= 5; ++n)
      for (int i = 0; i < iters; ++i) {
        SymPolytope p = hull_symmetric_int(random_symmetric_points(n, n + extra(rng), rng));
        auto r = check_bound(p);
        auto inv = check_invariants(p);
        ++st.cases;
        if (!r.satisfied || !inv.empty()) {
          ++st.failures;
          if (st.detail.empty()) st.detail = "rank " + std::to_string(n) + (inv.empty() ? " bound" : " " + inv[0]);
        }
      }
    if (cfg.inject_broken_hull) {
      SymPolytope broken = cross_polytope(3);
      broken.edges.resize(2);  // fixture: most edges lost
      auto r = check_bound(broken);
      ++st.cases;
      if (!r.satisfied) {
        ++st.failures;
        st.detail = "injected hull: V/2+E=" + std::to_string(r.half_V_plus_E) + " < " + std::to_string(r.bound);
      }
    }
    suites.push_back(st);
  }
  {  // integrator drift
    Suite st;
    st.name = "integrator";
    auto flat = constant_metric(2, 1.0);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < std::max(1, iters / 10); ++i) {
      RVec x0{u(rng), u(rng)}, d{u(rng), u(rng)};
      auto tr = integrate_geodesic(flat, x0, d, 100.0);
      double nd = norm_l2(d), dev = 0;
      for (size_t k = 0; k < tr.t.size(); ++k)
        for (int c = 0; c < 2; ++c) dev = std::max(dev, std::fabs(tr.pos[k][c] - x0[c] - tr.t[k] * d[c] / nd));
      ++st.cases;
      if (dev > 1e-6) ++st.failures, st.detail = "flat deviation " + std::to_string(dev);
    }
    auto hed = hedlund_smooth_metric(example_axis_highways(3));
    auto tr = integrate_geodesic(hed, {0.3, 0.45, 0.6}, {1.0, 0.35, 0.2}, 20.0);
    ++st.cases;
    if (tr.max_drift_rate > 1e-6) ++st.failures, st.detail = "drift rate " + std::to_string(tr.max_drift_rate);
    suites.push_back(st);
  }

  bool ok = true;
  for (const auto& st : suites) {
    bool pass = st.failures == 0 && st.cases > 0;
    ok = ok && pass;
    out << "suite=" << st.name << " seed=" << cfg.seed << " cases=" << st.cases << " failures=" << st.failures
        << " status=" << (pass ? "PASS" : "FAIL");
    if (!st.detail.empty()) out << " detail=\"" << st.detail << "\"";
    out << "\n";
  }
  out << "selftest: " << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kOk : kFailure;
}

}  // namespace sn::cli
