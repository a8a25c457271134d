#include "stablenorm/space_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace sn {

ParseError::ParseError(int l, const std::string& msg) : std::runtime_error("line " + std::to_string(l) + ": " + msg), line(l) {}

namespace {

std::string real(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

struct Lines {
  std::vector<std::string> raw;
  size_t next = 0;
  int lineno = 0;
  explicit Lines(const std::string& text) {
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);) {
      if (!l.empty() && l.back() == '\r') l.pop_back();
      raw.push_back(l);
    }
  }
  // next non-blank, non-comment line split into tokens; empty at EOF
  std::vector<std::string> get() {
    while (next < raw.size()) {
      lineno = int(++next);
      const std::string& l = raw[next - 1];
      size_t p = l.find_first_not_of(" \t");
      if (p == std::string::npos || l[p] == '#') continue;
      std::istringstream ls(l);
      std::vector<std::string> tok;
      for (std::string t; ls >> t;) tok.push_back(t);
      return tok;
    }
    lineno = int(raw.size()) + 1;
    return {};
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(lineno, msg); }
};

double to_real(const Lines& L, const std::string& t) {
  double x;
  auto r = std::from_chars(t.data(), t.data() + t.size(), x);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size()) L.fail("not a number: '" + t + "'");
  return x;
}
long long to_int(const Lines& L, const std::string& t) {
  long long x;
  auto r = std::from_chars(t.data(), t.data() + t.size(), x);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size()) L.fail("not an integer: '" + t + "'");
  return x;
}

void expect_magic(Lines& L, const std::string& magic) {
  auto t = L.get();
  if (t.size() != 2 || t[0] != magic) L.fail("expected '" + magic + " 1'");
  if (t[1] != "1") L.fail("unsupported version " + t[1]);
}

}  // namespace

std::string serialize_space(const PeriodicSpace& s) {
  std::ostringstream os;
  os << "stablenorm-space 1\n";
  os << "rank " << s.rank() << " dim " << s.dim() << " vertices " << s.num_vertices() << " edges "
     << s.num_edges() / 2 << " basepoint " << s.basepoint() << '\n';
  for (const auto& [k, v] : s.meta) os << "meta " << k << ' ' << v << '\n';
  for (int v = 0; v < s.num_vertices(); ++v) {
    os << 'v';
    for (int k = 0; k < s.dim(); ++k) os << ' ' << real(s.position_ptr(v)[k]);
    os << '\n';
  }
  for (int e = 0; e < s.num_edges(); e += 2) {
    const Edge& ed = s.edge(e);
    os << "e " << ed.u << ' ' << ed.v << ' ' << real(ed.length);
    for (int k = 0; k < s.rank(); ++k) os << ' ' << s.label_ptr(e)[k];
    os << '\n';
  }
  os << "end\n";
  return os.str();
}

PeriodicSpace parse_space(const std::string& text) {
  Lines L(text);
  expect_magic(L, "stablenorm-space");
  auto h = L.get();
  if (h.size() != 10 || h[0] != "rank" || h[2] != "dim" || h[4] != "vertices" || h[6] != "edges" || h[8] != "basepoint")
    L.fail("expected 'rank <b> dim <n> vertices <V> edges <E> basepoint <p>'");
  long long b = to_int(L, h[1]), n = to_int(L, h[3]), V = to_int(L, h[5]), E = to_int(L, h[7]), bp = to_int(L, h[9]);
  if (b < 1 || n < 0 || V < 1 || E < 0) L.fail("invalid counts");
  if (2 * E > (long long)kMaxEdges) L.fail("edge count exceeds the memory guard");
  PeriodicSpace s{int(b), int(n)};
  auto t = L.get();
  while (!t.empty() && t[0] == "meta") {
    if (t.size() != 3) L.fail("expected 'meta <key> <value>'");
    s.meta[t[1]] = t[2];
    t = L.get();
  }
  for (long long v = 0; v < V; ++v, t = L.get()) {
    if (t.empty() || t[0] != "v" || (long long)t.size() != n + 1)
      L.fail("expected vertex record 'v' with " + std::to_string(n) + " coordinates");
    RVec p(n);
    for (long long k = 0; k < n; ++k) p[k] = to_real(L, t[k + 1]);
    s.add_vertex(p);
  }
  for (long long e = 0; e < E; ++e, t = L.get()) {
    if (t.empty() || t[0] != "e" || (long long)t.size() != b + 4)
      L.fail("expected edge record 'e u v length' with " + std::to_string(b) + " label entries");
    long long u = to_int(L, t[1]), v = to_int(L, t[2]);
    double len = to_real(L, t[3]);
    IVec lab(b);
    for (long long k = 0; k < b; ++k) lab[k] = to_int(L, t[k + 4]);
    if (u < 0 || v < 0 || u >= V || v >= V) L.fail("edge endpoint out of range");
    try {
      s.add_edge_pair(int(u), int(v), len, lab);
    } catch (const std::exception& ex) {
      L.fail(ex.what());
    }
  }
  if (t.size() != 1 || t[0] != "end") L.fail("expected 'end'");
  if (bp < 0 || bp >= V) L.fail("basepoint out of range");
  try {
    s.finalize(int(bp));
  } catch (const std::exception& ex) {
    L.fail(std::string("invalid space: ") + ex.what());
  }
  return s;
}

std::string serialize_ledger(const ConstantsLedger& l, int rank) {
  std::ostringstream os;
  os << "stablenorm-ledger 1\n"
     << "rank " << rank << '\n'
     << "diam " << real(l.diam) << '\n'
     << "J " << real(l.J) << '\n'
     << "K " << real(l.K) << '\n'
     << "D " << real(l.D) << '\n'
     << "k_radius " << real(l.k_radius) << '\n'
     << "k_points " << l.k_points << '\n'
     << "k_certified " << (l.k_certified ? 1 : 0) << '\n'
     << "end\n";
  return os.str();
}

ConstantsLedger parse_ledger(const std::string& text, int* rank_out) {
  Lines L(text);
  expect_magic(L, "stablenorm-ledger");
  ConstantsLedger l;
  long long rank = -1;
  bool seen_D = false;
  int D_line = 0;
  for (auto t = L.get();; t = L.get()) {
    if (t.empty()) L.fail("missing 'end'");
    if (t.size() == 1 && t[0] == "end") break;
    if (t.size() != 2) L.fail("expected '<key> <value>'");
    const std::string& k = t[0];
    if (k == "rank")
      rank = to_int(L, t[1]);
    else if (k == "diam")
      l.diam = to_real(L, t[1]);
    else if (k == "J")
      l.J = to_real(L, t[1]);
    else if (k == "K")
      l.K = to_real(L, t[1]);
    else if (k == "D")
      l.D = to_real(L, t[1]), seen_D = true, D_line = L.lineno;
    else if (k == "k_radius")
      l.k_radius = to_real(L, t[1]);
    else if (k == "k_points")
      l.k_points = size_t(to_int(L, t[1]));
    else if (k == "k_certified")
      l.k_certified = to_int(L, t[1]) != 0;
    else
      L.fail("unknown key '" + k + "'");
  }
  if (rank < 1) L.fail("missing or invalid rank");
  if (!seen_D) L.fail("missing D");
  if (l.diam < 0 || l.J < 0 || l.K < 0) L.fail("negative constant");
  if (!l.consistent(int(rank))) throw ParseError(D_line, "D does not equal (b+5)*diam + 2*K");
  if (rank_out) *rank_out = int(rank);
  return l;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace sn
