#include "curvekit/overlay.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "engine_internal.hpp"

// Census of the complementary regions of two curve systems in joint minimal
// position, at the compressed scale of the pair engine: the probe system is
// enumerated strand by strand while the field system is kept as counts, so
// everything the field contributes in bulk — nested corner chords, sheets of
// parallel corridor — is handled as intervals with multiplicities rather
// than one strand at a time.
//
// Inside a triangle the field chords nest around each corner; we call such a
// nest a ladder, its faces indexed outward from the vertex disk at 0.  A face
// is *explicit* when a probe chord starts, ends, or turns there — only
// O(probe weight) of those exist, and they are built as honest cell
// complexes.  The remaining faces form runs of parallel corridors; regions
// passing through them are walked as interval fronts with the same affine
// jump acceleration the rank walk uses, so a twist power of astronomical
// size costs its bit length, not its value.

namespace curvekit {
namespace {

using internal::Field;
using internal::PairFrame;
using internal::ProbeStep;
using internal::corner_depths;
using internal::last_n_ge;
using internal::last_n_le;
using internal::tighten_bound;

constexpr int kCentral = -1;
constexpr int kLoWall = 0;
constexpr int kHiWall = 1;
constexpr long long kWalkStepCap = 200000;
constexpr long long kFamilyCap = 20000;
constexpr long long kBruteForcePairCap = 1024;
// Verify witness disjointness against a system only when its total weight
// stays below this; against the enumerated probe it is always verified.
const long long kFieldVerifyCap = 1000000;

Int fdiv(const Int& a, const Int& b) {
  CK_CHECK(b > 0, "division by a nonpositive stride");
  Int q = a / b;
  if (a % b != 0 && a < 0) --q;
  return q;
}

Int cdiv(const Int& a, const Int& b) { return -fdiv(-a, b); }

Int nonneg_mod(const Int& a, const Int& g) {
  Int r = a % g;
  return r < 0 ? Int(r + g) : r;
}

// Largest n >= 0 such that no k in [1, n] puts point p inside the shifted
// interval [x + k*d, y + k*d); nullopt when no k ever hits.
std::optional<Int> avoid_point(const Int& x, const Int& y, const Int& d,
                               const Int& p) {
  Int k1, k2;
  if (d > 0) {
    k1 = cdiv(p - y + 1, d);
    k2 = fdiv(p - x, d);
  } else {
    Int dp = -d;
    k1 = cdiv(x - p, dp);
    k2 = fdiv(y - 1 - p, dp);
  }
  if (k1 < 1) k1 = 1;
  if (k1 > k2) return std::nullopt;
  return Int(k1 - 1);
}

// Occupied face positions [a + k*s, a + k*s + w) for k in [0, n); members
// never overlap (s >= w whenever n > 1).
struct Prog {
  Int a, w, s, n;
};

Int prog_overlap(const Prog& pr, const Int& k, const Int& lo, const Int& hi) {
  Int x = pr.a + k * pr.s;
  Int y = x + pr.w;
  Int l = x > lo ? x : lo;
  Int h = y < hi ? y : hi;
  return h > l ? Int(h - l) : Int(0);
}

// Occupied positions inside [lo, hi).
Int prog_coverage(const Prog& pr, const Int& lo, const Int& hi) {
  if (hi <= lo) return 0;
  Int kA = fdiv(lo - pr.a - pr.w, pr.s) + 1;
  Int kB = fdiv(hi - 1 - pr.a, pr.s);
  if (kA < 0) kA = 0;
  if (kB > pr.n - 1) kB = Int(pr.n - 1);
  if (kA > kB) return 0;
  if (kA == kB) return prog_overlap(pr, kA, lo, hi);
  return Int(prog_overlap(pr, kA, lo, hi) + prog_overlap(pr, kB, lo, hi) +
             (kB - kA - 1) * pr.w);
}

// Free faces strictly between the members of p and those of o, in each
// direction (below = nearest member of o under p; above = over p); nullopt
// when o has no member on that side.  Exact by enumeration for small
// progressions; for large ones the member offsets fill a residue class mod
// gcd of the strides, giving a safe lower bound (never an overestimate).
struct Margins {
  std::optional<Int> below, above;
};

Margins pair_margins(const Prog& p, const Prog& o, bool same) {
  Margins m;
  auto shrink = [](std::optional<Int>& s, const Int& v) {
    if (!s.has_value() || v < *s) s = v;
  };
  if (p.n * o.n <= kBruteForcePairCap) {
    long long pn = p.n.convert_to<long long>();
    long long on = o.n.convert_to<long long>();
    for (long long i = 0; i < pn; ++i)
      for (long long j = 0; j < on; ++j) {
        if (same && i == j) continue;
        Int D = Int((o.a + j * o.s) - (p.a + i * p.s));
        if (D >= p.w)
          shrink(m.above, Int(D - p.w));
        else if (-D >= o.w)
          shrink(m.below, Int(-D - o.w));
        else
          CK_CHECK(false, "overlapping corridor claims");
      }
    return m;
  }
  Int sp = p.n > 1 ? p.s : Int(0);
  Int so = o.n > 1 ? o.s : Int(0);
  Int g = gcd(sp, so);
  Int base = o.a - p.a;
  if (g == 0) {
    if (base >= p.w)
      m.above = Int(base - p.w);
    else if (-base >= o.w)
      m.below = Int(-base - o.w);
    else
      CK_CHECK(same && base == 0, "overlapping corridor claims");
    return m;
  }
  Int o_max = o.a + (o.n - 1) * so;
  Int p_max = p.a + (p.n - 1) * sp;
  if (Int(o_max - p.a) >= p.w) m.above = nonneg_mod(Int(base - p.w), g);
  if (Int(p_max - o.a) >= o.w) m.below = nonneg_mod(Int(-base - o.w), g);
  return m;
}

// Per-layer bulk carried along a corridor chain: faces entered, gaps crossed
// (both end hooks included), and crossings with each chart edge.
struct Payload {
  Int faces{0}, gaps{0};
  std::vector<Int> edges;

  explicit Payload(int num_edges) : edges(num_edges, 0) {}
  void accumulate(const Payload& o, const Int& times) {
    faces += o.faces * times;
    gaps += o.gaps * times;
    for (size_t i = 0; i < edges.size(); ++i) edges[i] += o.edges[i] * times;
  }
  Payload minus(const Payload& o) const {
    Payload d(static_cast<int>(edges.size()));
    d.faces = faces - o.faces;
    d.gaps = gaps - o.gaps;
    for (size_t i = 0; i < edges.size(); ++i)
      d.edges[i] = edges[i] - o.edges[i];
    return d;
  }
};

struct ChordEnd {
  int loc = kCentral;  // corner whose ladder holds the endpoint, or kCentral
  Int face{0};         // face index within that ladder
  int side = -1;       // triangle side carrying the endpoint
  Int rho{0};          // local position on that side
};

struct Chord {
  TriId t = -1;
  ChordEnd in, out;
  std::array<Int, 3> lo, hi;  // ladder levels crossed at each corner, [lo,hi)
};

struct Port {
  EdgeId e = -1;
  Int gap{0};       // field gap holding the probe point, from the a endpoint
  long long p = 0;  // position among the probe's own points on the edge
};

struct Run {
  Int A, B;  // face interval [A, B)
  Int q;     // probe chords passing through every face of the run
};

struct Ladder {
  TriId t = -1;
  int k = -1;
  Int cc{0};
  EdgeId e_lo = -1, e_hi = -1;  // wall edges: side k, side k+2
  bool fwd_lo = true, fwd_hi = true;
  Int m_lo{0}, m_hi{0};
  std::vector<int> touching;  // chords anchored here or crossing this corner
  std::vector<Int> marks;     // explicit faces, sorted
  std::vector<Run> runs;
};

struct Attach {
  int kind = 0;  // 0 unset, 1 explicit cell, 2 run face
  int cell = -1, hook = -1;   // kind 1
  int ladder = -1, run = -1;  // kind 2
  Int face{0};
  int gapside = kLoWall;  // which wall of the run face holds the gap
};

struct SubGap {
  EdgeId e = -1;
  Int gap{0};
  Attach att[2];  // indexed like Chart::sides_of(e)
};

struct GapRec {
  int first_sub = -1;      // P+1 consecutive sub-gap ids, P = ports.size()
  std::vector<int> ports;  // chords entering here, by position on the edge
};

struct CellRec {
  std::vector<int> hooks;  // sub-gap ids met along the boundary, in order
  long long corners = 0;
  std::vector<VertexId> verts;
};

struct ChainEnd {
  int kind = 0;  // 0 sub-gap, 1 cap slot of a q>=1 run
  int sub = -1;
  int ladder = -1, run = -1, side = kLoWall;
  Int a{0};  // first cap layer; the chain's width spans [a, a+width)
};

struct Chain {
  ChainEnd A, B;
  Int width{1};
  Payload pay;
};

// An interval of parallel corridor faces moving through the complement.
// seed0 names the chain layer sitting at face a; orient says whether layers
// ascend with faces.
struct Front {
  int ladder = -1;
  Int a, b;  // faces [a, b)
  int entered = kLoWall;
  bool orient = true;
  Int seed0{0};
};

struct LogEnt {
  bool is_gap = false;
  EdgeId e = -1;              // gap entries
  int ladder = -1, run = -1;  // face entries
  Int x, y;                   // interval crossed / entered
  bool sign = true;           // interval-ascending agrees with layer order
};

struct Snapshot {
  Front f;
  Payload pay;
  Int measure;
  size_t log_idx;
  Snapshot(const Front& fr, const Payload& p, const Int& m, size_t li)
      : f(fr), pay(p), measure(m), log_idx(li) {}
};

// One face claim of a cycle walk, with the layer direction it was made in.
struct OwnRec {
  int ladder = -1, run = -1;
  Prog p;
  bool sign = true;
};

struct Element {
  int type;  // 0 sub-gap slot, 1 chord passage, 2 vertex point
  int id;    // sub-gap id | chord id | vertex id
  int aux;   // slot: index in sides_of(e); chord: 1 when a crossing point
};

struct EndedPiece {
  ChainEnd end;
  Int seedlo;
  Int width;
};

struct StepResult {
  std::vector<Front> cont;
  std::vector<EndedPiece> ends;
  EdgeId gap_e = -1;
  Int ga, gb;
  bool gap_sign = true;
  bool split = false;
};

using TrailKey = std::tuple<int, int, bool>;

struct RegionBuilder {
  const Chart& c;
  PairFrame frame;
  int E, T;

  std::vector<Chord> chords;
  std::vector<Port> ports;      // port i = entry point of chord i
  std::vector<int> prev_chord;  // chord exiting at port i
  std::vector<int> next_port;   // exit port of chord i
  std::vector<Ladder> ladders;  // 3*t + k
  std::vector<std::map<Int, GapRec>> gaprecs;    // per edge
  std::vector<std::vector<Int>> explicit_sigma;  // sorted keys of gaprecs
  std::vector<SubGap> subgaps;
  std::vector<CellRec> cells;

  std::vector<Chain> chains;
  std::map<std::pair<int, int>, std::vector<Prog>> progs;  // q=0 face claims
  std::map<std::tuple<int, int, int>, std::vector<std::pair<Int, Int>>>
      consumed;  // cap layers owned by chains, per (ladder, run, side)
  std::set<int> sub_done;
  Int corridor_total{0}, corridor_seen{0};

  // Region classes that never touch an explicit cell.
  std::vector<RegionClass> loose;
  std::vector<std::vector<Int>> annulus_cores;  // witness candidates

  std::vector<int> uf;  // over explicit cells
  std::vector<Int> comp_F, comp_G, comp_corners;
  std::vector<int> comp_punct, comp_poles;

  RegionCensus census;

  RegionBuilder(const Chart& chart, const Weights& probe, const Weights& field)
      : c(chart),
        frame(chart, probe, field),
        E(chart.num_edges()),
        T(chart.num_triangles()) {
    for (EdgeId e = 0; e < E; ++e) {
      const auto& two = c.sides_of(e);
      CK_CHECK(two[0].tri != two[1].tri,
               "region census requires an edge's two sides in distinct "
               "triangles");
    }
    build_chords();
    build_ladders();
    build_gaps();
    build_explicit_faces();
    resolve_run_attachments();
    walk_corridors();
    sweep_cycles();
    assemble();
  }

  // ---------------------------------------------------------------- chords

  void build_chords() {
    for (size_t u = 0; u < frame.units.size(); ++u) {
      const auto& ps = frame.steps[u];
      int L = static_cast<int>(ps.size());
      int base = static_cast<int>(chords.size());
      for (int i = 0; i < L; ++i) {
        const ProbeStep& st = ps[i];
        const Int& r_in = frame.rank[u][i];
        const Int& r_out = frame.rank[u][(i + 1) % L];
        Port pt;
        pt.e = st.e;
        pt.gap = r_in;
        pt.p = frame.units[u].pos[i];
        ports.push_back(pt);
        prev_chord.push_back(base + (i + L - 1) % L);
        next_port.push_back(base + (i + 1) % L);

        Chord ch;
        ch.t = st.t;
        const Int& m_in = frame.f.m[st.e];
        const Int& m_out = frame.f.m[st.e_out];
        ch.in = classify_end(st.t, st.k, st.fwd ? r_in : Int(m_in - r_in));
        ch.out = classify_end(st.t, st.k_out,
                              st.fwd_out ? r_out : Int(m_out - r_out));
        auto P = corner_depths(frame.f, st.t, st.k, ch.in.rho);
        auto Q = corner_depths(frame.f, st.t, st.k_out, ch.out.rho);
        Int total{0};
        for (int k = 0; k < 3; ++k) {
          const Int& cc = frame.f.cc[st.t][k];
          Int mx = P[k] > Q[k] ? P[k] : Q[k];
          Int mn = P[k] > Q[k] ? Q[k] : P[k];
          ch.lo[k] = Int(cc - mx);
          ch.hi[k] = Int(cc - mn);
          total += mx - mn;
          if (ch.hi[k] > ch.lo[k])
            CK_CHECK(ch.in.loc == k || ch.out.loc == k,
                     "chord crosses a corner it is not anchored at");
        }
        CK_CHECK(
            total == internal::chord_crossings(frame.f, ps, i, r_in, r_out),
            "corner crossing intervals disagree with the chord count");
        chords.push_back(ch);
      }
    }
    // Joint position is consistent only if field gaps are monotone in probe
    // order along every edge.
    for (EdgeId e = 0; e < E; ++e) {
      std::vector<int> here;
      for (size_t i = 0; i < ports.size(); ++i)
        if (ports[i].e == e) here.push_back(static_cast<int>(i));
      std::sort(here.begin(), here.end(), [&](int x, int y) {
        if (x == y) return false;
        CK_CHECK(ports[x].p != ports[y].p, "two probe points share a slot");
        return ports[x].p < ports[y].p;
      });
      for (size_t j = 1; j < here.size(); ++j)
        CK_CHECK(ports[here[j - 1]].gap <= ports[here[j]].gap,
                 "field gaps decrease along an edge");
    }
  }

  ChordEnd classify_end(TriId t, int s, const Int& rho) const {
    ChordEnd end;
    end.side = s;
    end.rho = rho;
    const Int& cl = frame.f.cc[t][s];
    const Int& ch = frame.f.cc[t][(s + 1) % 3];
    Int m = cl + ch;
    CK_CHECK(rho >= 0 && rho <= m, "endpoint outside its side");
    if (rho < cl) {
      end.loc = s;
      end.face = rho;
    } else if (rho > cl) {
      end.loc = (s + 1) % 3;
      end.face = Int(m - rho);
    } else {
      end.loc = kCentral;
    }
    return end;
  }

  // --------------------------------------------------------------- ladders

  void build_ladders() {
    ladders.resize(3 * T);
    for (TriId t = 0; t < T; ++t) {
      const auto& e = c.triangles[t].e;
      CK_CHECK(e[0] != e[1] && e[1] != e[2] && e[0] != e[2],
               "triangle with a repeated edge");
      for (int k = 0; k < 3; ++k) {
        Ladder& L = ladders[3 * t + k];
        L.t = t;
        L.k = k;
        L.cc = frame.f.cc[t][k];
        L.e_lo = e[k];
        L.e_hi = e[(k + 2) % 3];
        L.fwd_lo = internal::side_forward(c, t, k);
        L.fwd_hi = internal::side_forward(c, t, (k + 2) % 3);
        L.m_lo = frame.f.m[L.e_lo];
        L.m_hi = frame.f.m[L.e_hi];
        if (L.cc > 0) L.marks.push_back(0);
      }
    }
    for (size_t x = 0; x < chords.size(); ++x) {
      const Chord& ch = chords[x];
      for (const ChordEnd* end : {&ch.in, &ch.out}) {
        if (end->loc == kCentral) continue;
        Ladder& L = ladders[3 * ch.t + end->loc];
        L.marks.push_back(end->face);
        L.touching.push_back(static_cast<int>(x));
      }
    }
    for (Ladder& L : ladders) {
      std::sort(L.marks.begin(), L.marks.end());
      L.marks.erase(std::unique(L.marks.begin(), L.marks.end()),
                    L.marks.end());
      std::sort(L.touching.begin(), L.touching.end());
      L.touching.erase(std::unique(L.touching.begin(), L.touching.end()),
                       L.touching.end());
      for (const Int& f : L.marks)
        CK_CHECK(f >= 0 && f < L.cc, "mark outside its ladder");
      for (size_t i = 0; i < L.marks.size(); ++i) {
        Int A = Int(L.marks[i] + 1);
        Int B = i + 1 < L.marks.size() ? L.marks[i + 1] : L.cc;
        if (A >= B) continue;
        Run r;
        r.A = A;
        r.B = B;
        r.q = 0;
        for (int x : L.touching)
          if (chords[x].lo[L.k] < A && B <= chords[x].hi[L.k]) ++r.q;
        L.runs.push_back(r);
      }
      for (const Run& r : L.runs)
        if (r.q == 0) corridor_total += r.B - r.A;
    }
  }

  // Chords crossing the ladder rung at `level`, ordered from its low-wall
  // end.  Each crossing chord is anchored in this corner at a face below the
  // level; the order along the rung follows from reading the crossing points
  // off the sub-disk each chord cuts off: low-wall anchors from the deepest
  // out, then high-wall anchors from the shallowest in, with gap position
  // breaking ties among anchors at the same face.
  std::vector<int> transit(const Ladder& L, const Int& level) const {
    struct Key {
      bool low;
      Int face;
      long long slot;
      int id;
    };
    std::vector<Key> ks;
    for (int x : L.touching) {
      const Chord& ch = chords[x];
      if (!(ch.lo[L.k] <= level && level < ch.hi[L.k])) continue;
      const ChordEnd* anch;
      int anch_port;
      if (ch.in.loc == L.k && ch.in.face == ch.lo[L.k] &&
          (ch.out.loc != L.k || ch.out.face > ch.in.face)) {
        anch = &ch.in;
        anch_port = x;
      } else {
        CK_CHECK(ch.out.loc == L.k && ch.out.face == ch.lo[L.k],
                 "transit chord without a deep anchor");
        anch = &ch.out;
        anch_port = next_port[x];
      }
      Key key;
      key.low = anch->side == L.k;
      key.face = anch->face;
      key.slot = port_ordinal(anch_port, key.low ? L.fwd_lo : L.fwd_hi);
      key.id = x;
      ks.push_back(key);
    }
    std::sort(ks.begin(), ks.end(), [](const Key& a, const Key& b) {
      if (a.id == b.id) return false;
      if (a.low != b.low) return a.low;
      if (a.face != b.face) return a.low ? a.face > b.face : a.face < b.face;
      CK_CHECK(a.slot != b.slot, "two anchors share a slot");
      return a.slot > b.slot;
    });
    std::vector<int> out;
    out.reserve(ks.size());
    for (const Key& k : ks) out.push_back(k.id);
    return out;
  }

  // Position of a port among the ports of its gap, counted from the wall's
  // start vertex.
  long long port_ordinal(int port, bool fwd) const {
    const Port& pt = ports[port];
    long long before = 0, total = 0;
    for (size_t i = 0; i < ports.size(); ++i) {
      if (ports[i].e != pt.e || ports[i].gap != pt.gap) continue;
      ++total;
      if (ports[i].p < pt.p) ++before;
    }
    return fwd ? before : total - 1 - before;
  }

  // ----------------------------------------------------------------- gaps

  Int sigma_of_local(EdgeId e, TriId t, int s, const Int& rho) const {
    return internal::side_forward(c, t, s) ? rho : Int(frame.f.m[e] - rho);
  }

  void build_gaps() {
    std::vector<std::set<Int>> want(E);
    for (TriId t = 0; t < T; ++t) {
      const auto& e = c.triangles[t].e;
      for (int s = 0; s < 3; ++s)
        want[e[s]].insert(sigma_of_local(e[s], t, s, frame.f.cc[t][s]));
    }
    for (const Ladder& L : ladders) {
      for (const Int& j : L.marks) {
        want[L.e_lo].insert(L.fwd_lo ? j : Int(L.m_lo - j));
        want[L.e_hi].insert(L.fwd_hi ? Int(L.m_hi - j) : j);
      }
    }
    for (const Port& pt : ports)
      CK_CHECK(want[pt.e].count(pt.gap) == 1, "probe point in an unmarked gap");
    gaprecs.resize(E);
    explicit_sigma.resize(E);
    for (EdgeId e = 0; e < E; ++e) {
      for (const Int& g : want[e]) {
        CK_CHECK(g >= 0 && g <= frame.f.m[e], "gap outside its edge");
        GapRec gr;
        for (size_t i = 0; i < ports.size(); ++i)
          if (ports[i].e == e && ports[i].gap == g)
            gr.ports.push_back(static_cast<int>(i));
        std::sort(gr.ports.begin(), gr.ports.end(),
                  [&](int x, int y) { return ports[x].p < ports[y].p; });
        gr.first_sub = static_cast<int>(subgaps.size());
        for (size_t s = 0; s <= gr.ports.size(); ++s) {
          SubGap sg;
          sg.e = e;
          sg.gap = g;
          subgaps.push_back(sg);
        }
        gaprecs[e].emplace(g, std::move(gr));
        explicit_sigma[e].push_back(g);
      }
    }
  }

  int side_index(EdgeId e, TriId t, int s) const {
    const auto& two = c.sides_of(e);
    if (two[0].tri == t && two[0].side == s) return 0;
    CK_CHECK(two[1].tri == t && two[1].side == s, "side not on its edge");
    return 1;
  }

  // ------------------------------------------------------- explicit faces

  // Appends the slots and probe points of an explicit gap, walking it from
  // the start vertex of side (t, s).
  void append_gap(std::vector<Element>& els, EdgeId e, TriId t, int s,
                  const Int& sigma) {
    auto it = gaprecs[e].find(sigma);
    CK_CHECK(it != gaprecs[e].end(), "expected an explicit gap");
    const GapRec& gr = it->second;
    bool fwd = internal::side_forward(c, t, s);
    int sidx = side_index(e, t, s);
    int P = static_cast<int>(gr.ports.size());
    for (int j = 0; j <= P; ++j) {
      els.push_back({0, gr.first_sub + (fwd ? j : P - j), sidx});
      if (j < P) {
        int port = gr.ports[fwd ? j : P - 1 - j];
        els.push_back({1, chord_on_side(port, t), 0});
      }
    }
  }

  // Of the two chords meeting at a probe point, the one inside triangle t.
  int chord_on_side(int port, TriId t) const {
    int a = port, b = prev_chord[port];
    bool ina = chords[a].t == t, inb = chords[b].t == t;
    CK_CHECK(ina != inb, "probe point flanked by one triangle twice");
    return ina ? a : b;
  }

  void append_transit(std::vector<Element>& els, const Ladder& L,
                      const Int& level, bool reversed) {
    std::vector<int> tr = transit(L, level);
    if (reversed) std::reverse(tr.begin(), tr.end());
    for (int x : tr) els.push_back({1, x, 1});
  }

  void build_explicit_faces() {
    for (const Ladder& L : ladders) {
      for (const Int& j : L.marks) {
        // ccw: high-wall gap, inner rung (or vertex), low-wall gap, outer
        std::vector<Element> els;
        append_gap(els, L.e_hi, L.t, (L.k + 2) % 3,
                   L.fwd_hi ? Int(L.m_hi - j) : j);
        if (j == 0)
          els.push_back({2, c.triangles[L.t].v[L.k], 0});
        else
          append_transit(els, L, Int(j - 1), true);
        append_gap(els, L.e_lo, L.t, L.k, L.fwd_lo ? j : Int(L.m_lo - j));
        append_transit(els, L, j, false);
        parenthesize(els);
      }
    }
    for (TriId t = 0; t < T; ++t) {
      std::vector<Element> els;
      const auto& e = c.triangles[t].e;
      for (int s = 0; s < 3; ++s) {
        append_gap(els, e[s], t, s,
                   sigma_of_local(e[s], t, s, frame.f.cc[t][s]));
        int k2 = (s + 1) % 3;
        const Ladder& L2 = ladders[3 * t + k2];
        if (L2.cc > 0)
          append_transit(els, L2, Int(L2.cc - 1), true);
        else
          els.push_back({2, c.triangles[t].v[k2], 0});
      }
      parenthesize(els);
    }
  }

  // Cuts one explicit face along its probe chords.  The chords form a
  // non-crossing matching of their boundary occurrences, so one pass with a
  // stack of open cells settles every element; crossing-type occurrences
  // contribute a corner to the cells on both flanks.
  void parenthesize(const std::vector<Element>& els) {
    std::map<int, int> seen;
    for (const Element& el : els)
      if (el.type == 1) ++seen[el.id];
    for (const auto& kv : seen)
      CK_CHECK(kv.second == 2, "chord meets a face boundary off twice");

    int base = new_cell();
    std::vector<int> open{base};
    std::map<int, int> opened_by;
    for (const Element& el : els) {
      if (el.type == 0) {
        int cell = open.back();
        Attach a;
        a.kind = 1;
        a.cell = cell;
        a.hook = static_cast<int>(cells[cell].hooks.size());
        subgaps[el.id].att[el.aux] = a;
        cells[cell].hooks.push_back(el.id);
      } else if (el.type == 2) {
        cells[open.back()].verts.push_back(el.id);
      } else {
        int before = open.back();
        auto it = opened_by.find(el.id);
        if (it == opened_by.end()) {
          int fresh = new_cell();
          opened_by.emplace(el.id, fresh);
          open.push_back(fresh);
        } else {
          CK_CHECK(open.back() == it->second,
                   "probe chords cross inside one face");
          open.pop_back();
        }
        if (el.aux == 1) {
          ++cells[before].corners;
          ++cells[open.back()].corners;
        }
      }
    }
    CK_CHECK(open.size() == 1 && open.back() == base,
             "unbalanced chords around a face");
  }

  int new_cell() {
    cells.emplace_back();
    return static_cast<int>(cells.size()) - 1;
  }

  // ------------------------------------------------- run-side resolution

  void resolve_run_attachments() {
    for (SubGap& sg : subgaps) {
      for (int i = 0; i < 2; ++i) {
        if (sg.att[i].kind != 0) continue;
        const SideRef& sr = c.sides_of(sg.e)[i];
        Int rho = sr.forward ? sg.gap : Int(frame.f.m[sg.e] - sg.gap);
        ChordEnd end = classify_end(sr.tri, sr.side, rho);
        CK_CHECK(end.loc != kCentral, "central gap missed its explicit face");
        int lad = 3 * sr.tri + end.loc;
        const Ladder& L = ladders[lad];
        CK_CHECK(!std::binary_search(L.marks.begin(), L.marks.end(), end.face),
                 "marked face missed its explicit build");
        Attach a;
        a.kind = 2;
        a.ladder = lad;
        a.run = run_index(L, end.face);
        a.face = end.face;
        a.gapside = (end.loc == sr.side) ? kLoWall : kHiWall;
        CK_CHECK((a.gapside == kLoWall ? L.e_lo : L.e_hi) == sg.e,
                 "run attachment on the wrong wall");
        sg.att[i] = a;
      }
      CK_CHECK(!(sg.att[0].kind == 2 && sg.att[1].kind == 2),
               "explicit gap with no explicit side");
    }
  }

  int run_index(const Ladder& L, const Int& face) const {
    for (size_t i = 0; i < L.runs.size(); ++i)
      if (L.runs[i].A <= face && face < L.runs[i].B)
        return static_cast<int>(i);
    CK_CHECK(false, "face in no run");
    return -1;
  }

  // ------------------------------------------------------ corridor walks

  Int seed_of(const Front& f, const Int& face) const {
    return f.orient ? Int(f.seed0 + (face - f.a))
                    : Int(f.seed0 - (face - f.a));
  }

  StepResult do_step(const Front& fr) const {
    StepResult res;
    const Ladder& L = ladders[fr.ladder];
    int exit_side = 1 - fr.entered;
    EdgeId ex = exit_side == kLoWall ? L.e_lo : L.e_hi;
    bool fx = exit_side == kLoWall ? L.fwd_lo : L.fwd_hi;
    const Int& m = frame.f.m[ex];
    bool asc = (exit_side == kLoWall) == fx;  // sigma ascends with face
    res.gap_e = ex;
    res.ga = asc ? fr.a : Int(m - fr.b + 1);
    res.gb = asc ? fr.b : Int(m - fr.a + 1);
    res.gap_sign = asc ? fr.orient : !fr.orient;

    int my_side = exit_side == kLoWall ? L.k : (L.k + 2) % 3;
    const auto& two = c.sides_of(ex);
    const SideRef& other =
        (two[0].tri == L.t && two[0].side == my_side) ? two[1] : two[0];

    const std::vector<Int>& marksig = explicit_sigma[ex];
    auto lo_it = std::lower_bound(marksig.begin(), marksig.end(), res.ga);
    std::vector<Int> cuts;
    for (auto it = lo_it; it != marksig.end() && *it < res.gb; ++it)
      cuts.push_back(*it);
    res.split = !cuts.empty();

    Int cur = res.ga;
    for (const Int& p : cuts) {
      if (p > cur) emit_piece(fr, res, other, m, asc, cur, p);
      // The single layer at an explicit gap ends there as a sub-gap link.
      auto it = gaprecs[ex].find(p);
      CK_CHECK(it->second.ports.empty(), "corridor crossed a probe point");
      EndedPiece ep;
      ep.end.kind = 0;
      ep.end.sub = it->second.first_sub;
      ep.seedlo = seed_of(fr, asc ? p : Int(m - p));
      ep.width = 1;
      res.ends.push_back(ep);
      cur = Int(p + 1);
    }
    if (res.gb > cur) emit_piece(fr, res, other, m, asc, cur, res.gb);
    return res;
  }

  void emit_piece(const Front& fr, StepResult& res, const SideRef& other,
                  const Int& m, bool asc, const Int& x, const Int& y) const {
    TriId t2 = other.tri;
    int s2 = other.side;
    Int r1 = other.forward ? x : Int(m - y + 1);
    Int r2 = other.forward ? y : Int(m - x + 1);
    const Int& cl = frame.f.cc[t2][s2];
    CK_CHECK(r2 <= cl || r1 > cl, "corridor piece spans the central gap");
    int lad;
    Int fa, fb;
    bool ascF;  // faces ascend with sigma
    int entered;
    if (r2 <= cl) {
      lad = 3 * t2 + s2;
      fa = r1;
      fb = r2;
      ascF = other.forward;
      entered = kLoWall;
    } else {
      lad = 3 * t2 + (s2 + 1) % 3;
      fa = Int(m - r2 + 1);
      fb = Int(m - r1 + 1);
      ascF = !other.forward;
      entered = kHiWall;
    }
    bool sign = asc ? fr.orient : !fr.orient;  // sigma order vs layer order
    bool orient2 = ascF ? sign : !sign;
    Int sig_at_fa = ascF ? x : Int(y - 1);
    Int seed_at_fa = seed_of(fr, asc ? sig_at_fa : Int(m - sig_at_fa));

    const Ladder& L2 = ladders[lad];
    int ri = run_index(L2, fa);
    const Run& run = L2.runs[ri];
    CK_CHECK(run.A <= fa && fb <= run.B, "corridor piece straddles a mark");
    if (run.q == 0) {
      Front nf;
      nf.ladder = lad;
      nf.a = fa;
      nf.b = fb;
      nf.entered = entered;
      nf.orient = orient2;
      nf.seed0 = seed_at_fa;
      res.cont.push_back(nf);
    } else {
      EndedPiece ep;
      ep.end.kind = 1;
      ep.end.ladder = lad;
      ep.end.run = ri;
      ep.end.side = entered;
      ep.end.a = fa;
      ep.width = Int(fb - fa);
      ep.seedlo = orient2 ? seed_at_fa : Int(seed_at_fa - (ep.width - 1));
      res.ends.push_back(ep);
    }
  }

  void commit_prog(int ladder, int run, const Int& a, const Int& w,
                   const Int& s, const Int& n) {
    CK_CHECK(n == 1 || s >= w, "overlapping corridor claims");
    progs[{ladder, run}].push_back({a, w, s, n});
    corridor_seen += w * n;
  }

  void register_chain(const ChainEnd& A, const ChainEnd& B, const Int& width,
                      Payload pay) {
    Chain ch{A, B, width, std::move(pay)};
    for (const ChainEnd* e : {&ch.A, &ch.B}) {
      if (e->kind == 1)
        consumed[{e->ladder, e->run, e->side}].push_back(
            {e->a, Int(e->a + width)});
      else
        CK_CHECK(sub_done.insert(e->sub).second,
                 "corridor chain reclaims a settled gap");
    }
    chains.push_back(std::move(ch));
  }

  // Drives one seeded front, and every piece it splits into, to its far
  // ends, registering one chain per ended piece.
  void run_front(const ChainEnd& seed_proto, const Front& seed, Payload pay0,
                 bool seed_on_corridor) {
    std::vector<std::pair<Front, Payload>> work;
    if (seed_on_corridor) {
      pay0.faces += 1;
      commit_prog(seed.ladder, run_index(ladders[seed.ladder], seed.a),
                  seed.a, Int(seed.b - seed.a), Int(1), Int(1));
    }
    work.push_back({seed, std::move(pay0)});
    while (!work.empty()) {
      Front f = work.back().first;
      Payload p = std::move(work.back().second);
      work.pop_back();
      std::map<TrailKey, Snapshot> trail;
      std::vector<LogEnt> log;
      long long steps = 0;
      while (true) {
        CK_CHECK(++steps < kWalkStepCap, "corridor walk failed to stabilize");
        jump(f, p, trail, log, nullptr, true, nullptr);
        StepResult res = do_step(f);
        p.gaps += 1;
        p.edges[res.gap_e] += 1;
        log.push_back({true, res.gap_e, -1, -1, res.ga, res.gb, res.gap_sign});
        for (const EndedPiece& ep : res.ends) {
          ChainEnd A = seed_proto;
          if (A.kind == 1) A.a = ep.seedlo;
          register_chain(A, ep.end, ep.width, p);
        }
        bool tail = false;
        for (const Front& nf : res.cont) {
          Payload np = p;
          np.faces += 1;
          int ri = run_index(ladders[nf.ladder], nf.a);
          commit_prog(nf.ladder, ri, nf.a, Int(nf.b - nf.a), Int(1), Int(1));
          if (!res.split && res.cont.size() == 1) {
            log.push_back({false, -1, nf.ladder, ri, nf.a, nf.b, nf.orient});
            f = nf;
            p = std::move(np);
            tail = true;
          } else {
            // A split invalidates the affine history; pieces restart fresh.
            work.push_back({nf, std::move(np)});
          }
        }
        if (!tail) break;
      }
    }
  }

  // Detects an affine recurrence of the walk state and jumps as many periods
  // as stay inside the same runs and clear of every explicit gap.  With
  // `seed` set (cycle walks) the jump also stops short of closing the loop.
  // recs, when given, receives the jumped claims for the margin scan.
  void jump(Front& f, Payload& p, std::map<TrailKey, Snapshot>& trail,
            std::vector<LogEnt>& log, const Front* seed, bool commit,
            std::vector<OwnRec>* recs) {
    TrailKey key{f.ladder, f.entered, f.orient};
    auto it = trail.find(key);
    if (it == trail.end()) {
      trail.emplace(key, Snapshot(f, p, corridor_seen, log.size()));
      return;
    }
    Snapshot snap = it->second;
    Int delta = Int(f.a - snap.f.a);
    CK_CHECK(Int(f.b - snap.f.b) == delta, "corridor front changed width");
    CK_CHECK(delta != 0, "corridor walk recurred without progress");
    std::optional<Int> K;
    for (size_t i = snap.log_idx; i < log.size(); ++i) {
      const LogEnt& ent = log[i];
      Int d = ent.sign == f.orient ? delta : Int(-delta);
      if (ent.is_gap) {
        for (const Int& pnt : explicit_sigma[ent.e])
          tighten_bound(K, avoid_point(ent.x, ent.y, d, pnt));
      } else {
        const Run& r = ladders[ent.ladder].runs[ent.run];
        if (d > 0)
          tighten_bound(K, last_n_le(ent.y, d, r.B));
        else
          tighten_bound(K, last_n_ge(ent.x, d, r.A));
        // Never skip past the loop's closure state: no shifted copy of a
        // face interval on the seed's ladder may cover the seed face.
        if (seed != nullptr && ent.ladder == seed->ladder)
          tighten_bound(K, avoid_point(ent.x, ent.y, d, seed->a));
      }
    }
    CK_CHECK(K.has_value(), "corridor jump is unbounded");
    if (*K < 1) {
      it->second = Snapshot(f, p, corridor_seen, log.size());
      return;
    }
    Payload period = p.minus(snap.pay);
    p.accumulate(period, *K);
    for (size_t i = snap.log_idx; i < log.size(); ++i) {
      const LogEnt& ent = log[i];
      if (ent.is_gap) continue;
      Int d = ent.sign == f.orient ? delta : Int(-delta);
      Int start = d > 0 ? Int(ent.x + d) : Int(ent.x + *K * d);
      Prog pr{start, Int(ent.y - ent.x), Int(d > 0 ? d : Int(-d)), *K};
      if (commit) commit_prog(ent.ladder, ent.run, pr.a, pr.w, pr.s, pr.n);
      if (recs != nullptr)
        recs->push_back({ent.ladder, ent.run, pr, ent.sign});
    }
    f.a += *K * delta;
    f.b += *K * delta;
    trail.clear();
    trail.emplace(key, Snapshot(f, p, corridor_seen, log.size()));
  }

  void walk_corridors() {
    // Chains hanging off explicit cells.
    for (size_t s = 0; s < subgaps.size(); ++s) {
      const SubGap& sg = subgaps[s];
      int runside = sg.att[0].kind == 2 ? 0 : (sg.att[1].kind == 2 ? 1 : -1);
      if (runside < 0 || sub_done.count(static_cast<int>(s))) continue;
      const Attach& at = sg.att[runside];
      Payload pay(E);
      pay.gaps = 1;
      pay.edges[sg.e] = 1;
      ChainEnd A;
      A.kind = 0;
      A.sub = static_cast<int>(s);
      if (ladders[at.ladder].runs[at.run].q > 0) {
        ChainEnd B;
        B.kind = 1;
        B.ladder = at.ladder;
        B.run = at.run;
        B.side = at.gapside;
        B.a = at.face;
        register_chain(A, B, Int(1), std::move(pay));
        continue;
      }
      Front fr;
      fr.ladder = at.ladder;
      fr.a = at.face;
      fr.b = Int(at.face + 1);
      fr.entered = at.gapside;
      fr.orient = true;
      fr.seed0 = at.face;
      run_front(A, fr, std::move(pay), true);
    }
    // Chains hanging off cap slots: seed from the first not-yet-consumed
    // layer interval, re-reading the complement after each walk so every
    // chain is traversed exactly once.
    for (size_t lad = 0; lad < ladders.size(); ++lad) {
      for (size_t ri = 0; ri < ladders[lad].runs.size(); ++ri) {
        if (ladders[lad].runs[ri].q == 0) continue;
        for (int side = 0; side < 2; ++side) {
          while (true) {
            auto gap = first_unconsumed(static_cast<int>(lad),
                                        static_cast<int>(ri), side);
            if (!gap.has_value()) break;
            ChainEnd A;
            A.kind = 1;
            A.ladder = static_cast<int>(lad);
            A.run = static_cast<int>(ri);
            A.side = side;
            A.a = gap->first;
            Front fr;
            fr.ladder = static_cast<int>(lad);
            fr.a = gap->first;
            fr.b = gap->second;
            fr.entered = 1 - side;  // first step crosses the hook gap
            fr.orient = true;
            fr.seed0 = gap->first;
            run_front(A, fr, Payload(E), false);
            auto again = first_unconsumed(static_cast<int>(lad),
                                          static_cast<int>(ri), side);
            CK_CHECK(!again.has_value() || again->first > gap->first,
                     "cap seeding made no progress");
          }
        }
      }
    }
    check_chain_closure();
  }

  std::optional<std::pair<Int, Int>> first_unconsumed(int lad, int ri,
                                                      int side) {
    const Run& run = ladders[lad].runs[ri];
    auto& iv = consumed[{lad, ri, side}];
    std::sort(iv.begin(), iv.end());
    Int cur = run.A;
    for (const auto& xy : iv) {
      CK_CHECK(xy.first >= cur, "cap layers claimed twice");
      if (xy.first > cur) return std::make_pair(cur, xy.first);
      cur = xy.second;
    }
    CK_CHECK(cur <= run.B, "cap claim overflows its run");
    if (cur < run.B) return std::make_pair(cur, run.B);
    return std::nullopt;
  }

  void check_chain_closure() {
    for (size_t s = 0; s < subgaps.size(); ++s) {
      const SubGap& sg = subgaps[s];
      bool has_run = sg.att[0].kind == 2 || sg.att[1].kind == 2;
      CK_CHECK(has_run == (sub_done.count(static_cast<int>(s)) == 1),
               "corridor chain bookkeeping out of balance");
    }
  }

  // ------------------------------------------------------ cycle families

  // Whatever corridor measure the chains did not claim belongs to closed
  // loops.  Each sweep finds one free face, walks its loop once at width 1,
  // widens to the loop's full parallel family, and records the family as an
  // annulus class.
  void sweep_cycles() {
    long long rounds = 0;
    while (corridor_seen < corridor_total) {
      CK_CHECK(++rounds < kFamilyCap,
               "cycle sweep failed to close the measure");
      auto free_pos = find_free_position();
      CK_CHECK(free_pos.has_value(),
               "corridor measure deficit with no free face");
      Front seed;
      seed.ladder = std::get<0>(*free_pos);
      seed.a = std::get<2>(*free_pos);
      seed.b = Int(seed.a + 1);
      seed.entered = kLoWall;
      seed.orient = true;
      seed.seed0 = seed.a;

      std::vector<OwnRec> recs;
      Payload probe_pay(E);
      walk_cycle(seed, probe_pay, &recs, false);

      auto margins = family_margins(recs);
      Int db = margins.first, da = margins.second;
      Front wide = seed;
      wide.a = Int(seed.a - db);
      wide.b = Int(seed.a + da + 1);
      wide.seed0 = wide.a;
      Payload pay(E);
      Int before = corridor_seen;
      walk_cycle(wide, pay, nullptr, true);
      CK_CHECK(corridor_seen > before, "cycle family claimed nothing");
      CK_CHECK(pay.faces == pay.gaps, "corridor loop is not flat");

      RegionClass rc;
      rc.chi = 0;
      rc.punctures = 0;
      rc.poles = 0;
      rc.multiplicity = Int(db + da + 1);
      rc.faces = pay.faces;
      rc.corners = 0;
      loose.push_back(rc);
      annulus_cores.push_back(pay.edges);
    }
    CK_CHECK(corridor_seen == corridor_total,
             "corridor measure failed to balance");
  }

  std::optional<std::tuple<int, int, Int>> find_free_position() {
    for (size_t lad = 0; lad < ladders.size(); ++lad)
      for (size_t ri = 0; ri < ladders[lad].runs.size(); ++ri) {
        const Run& run = ladders[lad].runs[ri];
        if (run.q != 0) continue;
        auto pit = progs.find({static_cast<int>(lad), static_cast<int>(ri)});
        const std::vector<Prog>* pv =
            pit == progs.end() ? nullptr : &pit->second;
        auto free_in = [&](const Int& hi) {  // free faces in [A, hi)
          Int cov{0};
          if (pv != nullptr)
            for (const Prog& pr : *pv) cov += prog_coverage(pr, run.A, hi);
          Int fr = Int(hi - run.A - cov);
          CK_CHECK(fr >= 0, "corridor claims overlap");
          return fr;
        };
        if (free_in(run.B) == 0) continue;
        Int lo = run.A, hi = Int(run.B - 1);  // least x with [A, x] free > 0
        while (lo < hi) {
          Int mid = Int(lo + (hi - lo) / 2);
          if (free_in(Int(mid + 1)) >= 1)
            hi = mid;
          else
            lo = Int(mid + 1);
        }
        CK_CHECK(free_in(Int(lo + 1)) == 1 && free_in(lo) == 0,
                 "free face search drifted");
        return std::make_tuple(static_cast<int>(lad), static_cast<int>(ri),
                               lo);
      }
    return std::nullopt;
  }

  // Walks a closed corridor loop once from `seed`, collecting the per-layer
  // payload.  Claims are committed only when `commit` is set; the narrow
  // discovery pass instead records its claims into recs for the margin scan.
  void walk_cycle(const Front& seed, Payload& pay, std::vector<OwnRec>* recs,
                  bool commit) {
    Front f = seed;
    std::map<TrailKey, Snapshot> trail;
    std::vector<LogEnt> log;
    long long steps = 0;
    bool first = true;
    auto note = [&](const Front& nf) {
      int ri = run_index(ladders[nf.ladder], nf.a);
      pay.faces += 1;
      log.push_back({false, -1, nf.ladder, ri, nf.a, nf.b, nf.orient});
      if (commit)
        commit_prog(nf.ladder, ri, nf.a, Int(nf.b - nf.a), Int(1), Int(1));
      if (recs != nullptr)
        recs->push_back(
            {nf.ladder, ri, Prog{nf.a, Int(nf.b - nf.a), Int(1), Int(1)},
             nf.orient});
    };
    note(f);
    while (true) {
      CK_CHECK(++steps < kWalkStepCap, "corridor loop failed to close");
      if (!first && f.ladder == seed.ladder && f.entered == seed.entered &&
          f.a == seed.a) {
        CK_CHECK(f.b == seed.b, "corridor loop returned at the wrong width");
        CK_CHECK(f.orient == seed.orient,
                 "corridor loop returned orientation-reversed");
        // The closing step re-entered the seed face; drop the double count.
        pay.faces -= 1;
        log.pop_back();
        if (commit) {
          auto& pv = progs[{f.ladder, run_index(ladders[f.ladder], f.a)}];
          corridor_seen -= pv.back().w;
          pv.pop_back();
        }
        if (recs != nullptr) recs->pop_back();
        break;
      }
      first = false;
      jump(f, pay, trail, log, &seed, commit, recs);
      StepResult res = do_step(f);
      CK_CHECK(res.ends.empty() && !res.split && res.cont.size() == 1,
               "corridor loop hit a marked face");
      pay.gaps += 1;
      pay.edges[res.gap_e] += 1;
      log.push_back({true, res.gap_e, -1, -1, res.ga, res.gb, res.gap_sign});
      f = res.cont[0];
      note(f);
    }
  }

  // Greatest widths the loop family can grow below/above its seed layer
  // before hitting a committed claim, a run boundary, or itself.  Claims of
  // the loop itself constrain both directions at half the free gap, since a
  // widened pass approaches its neighbor from both flanks at once.
  std::pair<Int, Int> family_margins(const std::vector<OwnRec>& recs) {
    std::optional<Int> below, above, pool;
    auto shrink = [](std::optional<Int>& m, const Int& v) {
      if (!m.has_value() || v < *m) m = v;
    };
    for (size_t i = 0; i < recs.size(); ++i) {
      const OwnRec& r = recs[i];
      const Run& run = ladders[r.ladder].runs[r.run];
      Int end_lo = Int(r.p.a - run.A);
      Int end_hi = Int(run.B - (r.p.a + (r.p.n - 1) * r.p.s + r.p.w));
      Int obs_lo = end_lo, obs_hi = end_hi;
      auto pit = progs.find({r.ladder, r.run});
      if (pit != progs.end())
        for (const Prog& o : pit->second) {
          Margins m = pair_margins(r.p, o, false);
          if (m.below.has_value() && *m.below < obs_lo) obs_lo = *m.below;
          if (m.above.has_value() && *m.above < obs_hi) obs_hi = *m.above;
        }
      if (r.sign) {
        shrink(below, obs_lo);
        shrink(above, obs_hi);
      } else {
        shrink(below, obs_hi);
        shrink(above, obs_lo);
      }
      for (size_t j = i; j < recs.size(); ++j) {
        const OwnRec& o = recs[j];
        if (o.ladder != r.ladder || o.run != r.run) continue;
        Margins m = pair_margins(r.p, o.p, i == j);
        if (m.below.has_value()) shrink(pool, fdiv(*m.below, Int(2)));
        if (m.above.has_value()) shrink(pool, fdiv(*m.above, Int(2)));
      }
    }
    CK_CHECK(below.has_value() && above.has_value(),
             "corridor loop with no face claims");
    if (pool.has_value()) {
      if (*pool < *below) below = *pool;
      if (*pool < *above) above = *pool;
    }
    CK_CHECK(*below >= 0 && *above >= 0, "negative family margin");
    return {*below, *above};
  }

  // ------------------------------------------------------------- assembly

  int find(int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  }
  void unite(int a, int b) { uf[find(a)] = find(b); }

  const Attach& subcell(int sub) const {
    const SubGap& sg = subgaps[sub];
    CK_CHECK(sg.att[0].kind == 1 || sg.att[1].kind == 1,
             "chain end without a cell");
    return sg.att[0].kind == 1 ? sg.att[0] : sg.att[1];
  }

  void assemble() {
    int n = static_cast<int>(cells.size());
    uf.resize(n);
    for (int i = 0; i < n; ++i) uf[i] = i;
    for (const Chain& ch : chains)
      if (ch.A.kind == 0 && ch.B.kind == 0)
        unite(subcell(ch.A.sub).cell, subcell(ch.B.sub).cell);
    for (const SubGap& sg : subgaps)
      if (sg.att[0].kind == 1 && sg.att[1].kind == 1)
        unite(sg.att[0].cell, sg.att[1].cell);

    comp_F.assign(n, Int(0));
    comp_G.assign(n, Int(0));
    comp_corners.assign(n, Int(0));
    comp_punct.assign(n, 0);
    comp_poles.assign(n, 0);
    for (int i = 0; i < n; ++i) {
      int r = find(i);
      comp_F[r] += 1;
      comp_corners[r] += cells[i].corners;
    }
    for (const SubGap& sg : subgaps)
      if (sg.att[0].kind == 1 && sg.att[1].kind == 1)
        comp_G[find(sg.att[0].cell)] += 1;
    for (const Chain& ch : chains) {
      if (ch.A.kind == 0 && ch.B.kind == 0) {
        int r = find(subcell(ch.A.sub).cell);
        comp_F[r] += ch.pay.faces;
        comp_G[r] += ch.pay.gaps;
      } else if (ch.A.kind == 0 || ch.B.kind == 0) {
        CK_CHECK(ch.width == 1, "cell-ended chain wider than one layer");
        int r = find(subcell(ch.A.kind == 0 ? ch.A.sub : ch.B.sub).cell);
        comp_F[r] += ch.pay.faces + 1;  // the cap slot
        comp_G[r] += ch.pay.gaps;
        comp_corners[r] += 2;
      } else {
        RegionClass rc;
        rc.chi = Int(ch.pay.faces + 2 - ch.pay.gaps);
        CK_CHECK(rc.chi == 1, "cap-to-cap corridor is not a disk");
        rc.punctures = 0;
        rc.poles = 0;
        rc.multiplicity = ch.width;
        rc.faces = Int(ch.pay.faces + 2);
        rc.corners = 4;
        loose.push_back(rc);
      }
    }
    // Interior slots of cap runs: plain squares between parallel chords.
    Int mid_total{0};
    for (const Ladder& L : ladders)
      for (const Run& r : L.runs)
        if (r.q > 1) mid_total += (r.q - 1) * (r.B - r.A);
    if (mid_total > 0) {
      RegionClass rc;
      rc.chi = 1;
      rc.punctures = 0;
      rc.poles = 0;
      rc.multiplicity = mid_total;
      rc.faces = 1;
      rc.corners = 4;
      loose.push_back(rc);
    }

    for (VertexId v = 0; v < c.num_vertices(); ++v) {
      int root = -1;
      for (int i = 0; i < n; ++i)
        for (VertexId w : cells[i].verts)
          if (w == v) {
            int r = find(i);
            CK_CHECK(root < 0 || r == root, "vertex split across regions");
            root = r;
          }
      CK_CHECK(root >= 0, "vertex in no region");
      if (c.vertices[v].is_puncture)
        comp_punct[root] += 1;
      else
        comp_poles[root] += 1;
    }

    std::map<std::tuple<Int, int, int, Int, Int>, Int> agg;
    for (int i = 0; i < n; ++i) {
      if (find(i) != i) continue;
      Int chi = Int(comp_F[i] - comp_G[i] + comp_punct[i] + comp_poles[i]);
      agg[{chi, comp_punct[i], comp_poles[i], comp_F[i], comp_corners[i]}] +=
          1;
    }
    for (const RegionClass& rc : loose)
      agg[{rc.chi, rc.punctures, rc.poles, rc.faces, rc.corners}] +=
          rc.multiplicity;

    census.crossings = frame.crossings;
    census.fills = true;
    Int chi_sum{0}, corner_sum{0};
    for (const auto& kv : agg) {
      RegionClass rc;
      rc.chi = std::get<0>(kv.first);
      rc.punctures = std::get<1>(kv.first);
      rc.poles = std::get<2>(kv.first);
      rc.faces = std::get<3>(kv.first);
      rc.corners = std::get<4>(kv.first);
      rc.multiplicity = kv.second;
      chi_sum += rc.chi * rc.multiplicity;
      corner_sum += rc.corners * rc.multiplicity;
      if (rc.chi != 1 || rc.punctures > 1) census.fills = false;
      census.regions.push_back(rc);
    }
    CK_CHECK(chi_sum == 2 + frame.crossings,
             "region census breaks the Euler count");
    CK_CHECK(corner_sum == 4 * frame.crossings,
             "region census breaks the corner count");
  }

  // -------------------------------------------------------------- witness

  // Boundary circles of one union-find component, as edge-crossing vectors
  // of their push-offs.  The walk hops hook to hook: directly across a
  // sub-gap when both sides are cells, through a chain's bulk when one side
  // runs off into corridor, and bouncing back around the cap slot when the
  // chain dead-ends there.
  std::vector<std::vector<Int>> trace_circles(int root) {
    std::map<int, int> chain_of_sub;
    for (size_t i = 0; i < chains.size(); ++i) {
      if (chains[i].A.kind == 0)
        chain_of_sub[chains[i].A.sub] = static_cast<int>(i);
      if (chains[i].B.kind == 0)
        chain_of_sub[chains[i].B.sub] = static_cast<int>(i);
    }
    long long total_hooks = 0;
    for (const CellRec& cl : cells) total_hooks += cl.hooks.size();
    std::set<std::pair<int, int>> visited;
    std::vector<std::vector<Int>> circles;
    for (size_t i = 0; i < cells.size(); ++i) {
      if (find(static_cast<int>(i)) != root) continue;
      for (size_t h = 0; h < cells[i].hooks.size(); ++h) {
        if (visited.count({static_cast<int>(i), static_cast<int>(h)}))
          continue;
        std::vector<Int> acc(E, 0);
        int cc = static_cast<int>(i), ch = static_cast<int>(h);
        long long guard = 0;
        do {
          CK_CHECK(++guard <= total_hooks, "boundary walk failed to close");
          visited.insert({cc, ch});
          int sub = cells[cc].hooks[ch];
          const SubGap& sg = subgaps[sub];
          acc[sg.e] += 1;
          int mine = -1;
          for (int s = 0; s < 2; ++s)
            if (sg.att[s].kind == 1 && sg.att[s].cell == cc &&
                sg.att[s].hook == ch)
              mine = s;
          CK_CHECK(mine >= 0, "hook lost its gap");
          const Attach& far_att = sg.att[1 - mine];
          if (far_att.kind == 1) {
            cc = far_att.cell;
            ch = far_att.hook;
          } else {
            const Chain& chain = chains.at(chain_of_sub.at(sub));
            const ChainEnd& far =
                (chain.A.kind == 0 && chain.A.sub == sub) ? chain.B : chain.A;
            if (far.kind == 0) {
              // through the chain to the far cell
              for (int k = 0; k < E; ++k) acc[k] += chain.pay.edges[k];
              acc[sg.e] -= 1;  // the near hook was already counted
              const Attach& at = subcell(far.sub);
              cc = at.cell;
              ch = at.hook;
            } else {
              // to the cap slot and back along the chain's other flank
              for (int k = 0; k < E; ++k) acc[k] += 2 * chain.pay.edges[k];
              acc[sg.e] -= 1;
            }
          }
          ch = (ch + 1) % static_cast<int>(cells[cc].hooks.size());
        } while (!(cc == static_cast<int>(i) && ch == static_cast<int>(h)));
        circles.push_back(std::move(acc));
      }
    }
    return circles;
  }

  std::optional<Weights> witness() {
    if (census.fills) return std::nullopt;
    std::vector<std::vector<Int>> raw = annulus_cores;
    for (size_t i = 0; i < cells.size(); ++i) {
      int r = static_cast<int>(i);
      if (find(r) != r) continue;
      Int chi = Int(comp_F[r] - comp_G[r] + comp_punct[r] + comp_poles[r]);
      if (chi == 1 && comp_punct[r] <= 1) continue;
      bool any_hook = false;
      for (size_t j = 0; j < cells.size(); ++j)
        if (find(static_cast<int>(j)) == r && !cells[j].hooks.empty())
          any_hook = true;
      CK_CHECK(any_hook, "bad region with an empty boundary");
      for (auto& v : trace_circles(r)) raw.push_back(std::move(v));
    }
    CK_CHECK(!raw.empty(), "non-filling census with no boundary circles");

    std::vector<Weights> links;
    for (VertexId v = 0; v < c.num_vertices(); ++v)
      if (c.vertices[v].is_puncture) links.push_back(puncture_link(c, v));
    std::vector<Weights> cands;
    std::set<std::vector<Int>> dedup;
    for (auto& vec : raw) {
      Weights w;
      w.w = std::move(vec);
      fold_excess(c, w);
      pole_tighten(c, w);
      if (w.is_zero()) continue;
      bool inessential = false;
      for (const Weights& l : links)
        if (w == l) inessential = true;
      if (inessential) continue;
      if (!dedup.insert(w.w).second) continue;
      cands.push_back(std::move(w));
    }
    std::sort(cands.begin(), cands.end(),
              [](const Weights& a, const Weights& b) {
                Int ta = a.total(), tb = b.total();
                if (ta != tb) return ta < tb;
                return a.w < b.w;
              });
    if (!cands.empty()) {
      const Weights& w = cands.front();
      CK_CHECK(intersection_number(c, w, frame.probe) == 0,
               "complement circle meets the probe");
      if (frame.field.total() <= kFieldVerifyCap)
        CK_CHECK(intersection_number(c, w, frame.field) == 0,
                 "complement circle meets the field");
      return w;
    }
    CK_CHECK(false, "non-filling union yielded no essential circle");
    return std::nullopt;
  }
};

}  // namespace

RegionCensus overlay_census(const Chart& c, const Weights& a,
                            const Weights& b) {
  std::string why;
  CK_CHECK(admissible(c, a, &why), why);
  CK_CHECK(admissible(c, b, &why), why);
  const bool a_small = a.total() <= b.total();
  RegionBuilder rb(c, a_small ? a : b, a_small ? b : a);
  return rb.census;
}

bool pair_fills(const Chart& c, const Weights& a, const Weights& b) {
  return overlay_census(c, a, b).fills;
}

std::optional<Weights> disjoint_witness(const Chart& c, const Weights& a,
                                        const Weights& b) {
  std::string why;
  CK_CHECK(admissible(c, a, &why), why);
  CK_CHECK(admissible(c, b, &why), why);
  CK_CHECK(!(a.is_zero() && b.is_zero()),
           "witness of an empty union is unconstrained");
  const bool a_small = a.total() <= b.total();
  RegionBuilder rb(c, a_small ? a : b, a_small ? b : a);
  return rb.witness();
}

}  // namespace curvekit
