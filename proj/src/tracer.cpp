#include "curvekit/tracer.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "curvekit/bigint.hpp"
#include "normal_internal.hpp"

// The walker keeps a joint picture of up to two curve systems as tokens: one
// token per strand-edge crossing, linked into cyclic words, plus an explicit
// ordering of the tokens along every edge.  Consecutive tokens of a word span
// a chord of one triangle, so the whole picture — crossings, faces, regions —
// is reconstructible from (words, per-edge orders, chord triangles).  All
// isotopies below are local surgeries on that data.
//
// Two facts carry the correctness burden and are asserted throughout:
//  * a picture whose chords never cross their own curve and whose word has no
//    two consecutive tokens on one edge is a normal realization, so its class
//    is determined by its weight vector alone;
//  * an innermost same-edge hairpin is always adjacent in the edge order, so
//    hairpin removal by itself reaches the normal word.

namespace curvekit {
namespace {

using internal::as_ll;
using internal::side_with_edge;
using internal::side_forward;
using internal::left_tri;
using internal::UnitWord;
using internal::walk_units;

// ---------------------------------------------------------------------------
// Joint token state.

struct Tok {
  EdgeId edge = -1;
  int curve = -1;
  int next = -1, prev = -1;
  TriId seg_tri = -1;  // triangle of the chord from this token to next
  bool alive = false;
};

struct State {
  const Chart* c = nullptr;
  std::vector<Tok> tok;
  std::vector<std::vector<int>> order;  // per edge, token ids from endpoint a

  int alloc(EdgeId e, int curve) {
    tok.push_back(Tok{e, curve, -1, -1, -1, true});
    return static_cast<int>(tok.size()) - 1;
  }
  int idx_in(int id) const {
    const auto& v = order[tok[id].edge];
    for (size_t i = 0; i < v.size(); ++i)
      if (v[i] == id) return static_cast<int>(i);
    CK_CHECK(false, "token missing from its edge order");
    return -1;
  }
  void erase_from_order(int id) {
    auto& v = order[tok[id].edge];
    v.erase(v.begin() + idx_in(id));
  }
};

// Both systems must be admissible and tight.
State build_state(const Chart& c, const Weights& a, const Weights& b) {
  State s;
  s.c = &c;
  s.order.assign(c.num_edges(), {});
  const Weights* sys[2] = {&a, &b};

  std::vector<std::vector<std::vector<int>>> grid(2);
  for (int cu = 0; cu < 2; ++cu) {
    grid[cu].assign(c.num_edges(), {});
    for (EdgeId e = 0; e < c.num_edges(); ++e) {
      long long n = as_ll((*sys[cu])[e], "edge weight");
      for (long long g = 0; g < n; ++g) grid[cu][e].push_back(s.alloc(e, cu));
    }
    for (const UnitWord& word : walk_units(c, *sys[cu])) {
      int m = static_cast<int>(word.edges.size());
      for (int i = 0; i < m; ++i) {
        int id = grid[cu][word.edges[i]][word.pos[i]];
        int nid = grid[cu][word.edges[(i + 1) % m]][word.pos[(i + 1) % m]];
        s.tok[id].next = nid;
        s.tok[nid].prev = id;
        s.tok[id].seg_tri = word.tri[i];
      }
    }
  }
  // Sheared merge along every edge: strand i of n sits at (2i+1)/(2n), so
  // parallel families of the two systems interleave instead of stacking.
  for (EdgeId e = 0; e < c.num_edges(); ++e) {
    long long na = static_cast<long long>(grid[0][e].size());
    long long nb = static_cast<long long>(grid[1][e].size());
    long long ia = 0, ib = 0;
    auto& ord = s.order[e];
    while (ia < na || ib < nb) {
      bool take_a;
      if (ia >= na)
        take_a = false;
      else if (ib >= nb)
        take_a = true;
      else
        take_a = (2 * ia + 1) * nb <= (2 * ib + 1) * na;
      ord.push_back(take_a ? grid[0][e][ia++] : grid[1][e][ib++]);
    }
  }
  for (const auto& t : s.tok)
    if (t.alive) CK_CHECK(t.next >= 0 && t.seg_tri >= 0, "unlinked token");
  return s;
}

// ---------------------------------------------------------------------------
// Crossings of the current picture.

struct Cross {
  int sa = -1, sb = -1;  // tokens whose chords cross (curve 0, curve 1)
  TriId t = -1;
  long long ra1 = 0, ra2 = 0, rb1 = 0, rb2 = 0;  // boundary ranks in t
  int node = -1;                                 // arrangement node id
};

struct CrossSet {
  std::vector<Cross> list;
  // per token: indices into list, sorted along the chord from the token end
  std::map<int, std::vector<int>> along;
};

long long rank_stride(const State& s) {
  long long stride = 2;
  for (const auto& v : s.order)
    stride = std::max(stride, static_cast<long long>(v.size()) + 2);
  return stride;
}

// Cyclic position of token id on the boundary of triangle t.
long long rank_of(const State& s, TriId t, int id, long long stride) {
  const Chart& c = *s.c;
  EdgeId e = s.tok[id].edge;
  int k = side_with_edge(c, t, e);
  long long n = static_cast<long long>(s.order[e].size());
  long long i = s.idx_in(id);
  long long local = side_forward(c, t, k) ? i : n - 1 - i;
  return k * stride + local;
}

CrossSet find_crossings(const State& s) {
  const Chart& c = *s.c;
  CrossSet cs;
  const long long stride = rank_stride(s);
  const long long L = 3 * stride;
  std::vector<std::vector<int>> segs(c.num_triangles());
  for (int id = 0; id < static_cast<int>(s.tok.size()); ++id)
    if (s.tok[id].alive) segs[s.tok[id].seg_tri].push_back(id);

  auto between = [&](long long x, long long y, long long z) {
    return ((y - x + L) % L) < ((z - x + L) % L);
  };
  for (TriId t = 0; t < c.num_triangles(); ++t) {
    for (int pa : segs[t]) {
      if (s.tok[pa].curve != 0) continue;
      long long ra1 = rank_of(s, t, pa, stride);
      long long ra2 = rank_of(s, t, s.tok[pa].next, stride);
      for (int pb : segs[t]) {
        if (s.tok[pb].curve != 1) continue;
        long long rb1 = rank_of(s, t, pb, stride);
        long long rb2 = rank_of(s, t, s.tok[pb].next, stride);
        if (between(ra1, rb1, ra2) != between(ra1, rb2, ra2))
          cs.list.push_back(Cross{pa, pb, t, ra1, ra2, rb1, rb2, -1});
      }
    }
  }
  for (int i = 0; i < static_cast<int>(cs.list.size()); ++i) {
    cs.along[cs.list[i].sa].push_back(i);
    cs.along[cs.list[i].sb].push_back(i);
  }
  auto dist = [&](long long x, long long y) { return (y - x + L) % L; };
  for (auto& [id, v] : cs.along) {
    // order along the chord: the crossing chords are pairwise disjoint, so
    // the nearer of a chord's two boundary endpoints sorts them strictly
    bool on_a = s.tok[id].curve == 0;
    long long from = on_a ? cs.list[v[0]].ra1 : cs.list[v[0]].rb1;
    std::sort(v.begin(), v.end(), [&](int x, int y) {
      const Cross& cx = cs.list[x];
      const Cross& cy = cs.list[y];
      long long x1 = on_a ? cx.rb1 : cx.ra1, x2 = on_a ? cx.rb2 : cx.ra2;
      long long y1 = on_a ? cy.rb1 : cy.ra1, y2 = on_a ? cy.rb2 : cy.ra2;
      long long gx = std::min(dist(from, x1), dist(from, x2));
      long long gy = std::min(dist(from, y1), dist(from, y2));
      CK_CHECK(gx != gy, "crossing order tie");
      return gx < gy;
    });
  }
  return cs;
}

// Per-triangle check that chords of one curve never cross each other.
void check_embedded(const State& s) {
  const Chart& c = *s.c;
  const long long stride = rank_stride(s);
  const long long L = 3 * stride;
  auto between = [&](long long x, long long y, long long z) {
    return ((y - x + L) % L) < ((z - x + L) % L);
  };
  std::vector<std::vector<int>> segs(c.num_triangles());
  for (int id = 0; id < static_cast<int>(s.tok.size()); ++id)
    if (s.tok[id].alive) segs[s.tok[id].seg_tri].push_back(id);
  for (TriId t = 0; t < c.num_triangles(); ++t)
    for (size_t i = 0; i < segs[t].size(); ++i)
      for (size_t j = i + 1; j < segs[t].size(); ++j) {
        int p = segs[t][i], q = segs[t][j];
        if (s.tok[p].curve != s.tok[q].curve) continue;
        long long p1 = rank_of(s, t, p, stride);
        long long p2 = rank_of(s, t, s.tok[p].next, stride);
        long long q1 = rank_of(s, t, q, stride);
        long long q2 = rank_of(s, t, s.tok[q].next, stride);
        CK_CHECK(between(p1, q1, p2) == between(p1, q2, p2),
                 "curve crosses itself");
      }
}

// ---------------------------------------------------------------------------
// Arrangement: the curves together with the chart one-skeleton, faces via the
// rotation system, regions by merging faces across chart segments.

struct Arr {
  CrossSet cs;
  int n_nodes = 0;
  int crossing_base = 0;               // nodes >= this are crossings
  std::vector<int> head, tail;         // per dart; twin of d is d^1
  std::vector<char> chart_dart;        // per dart
  std::vector<int> dart_curve;         // per dart: curve id, or -1 for chart
  std::vector<int> dart_seg;           // per dart: owning token of the chord
  std::vector<std::vector<int>> rot;   // per node: outgoing darts, CCW
  std::vector<int> rotpos, face, nxt;  // per dart
  int n_faces = 0;
  std::vector<int> region_of_face;  // face -> dense region index
  int n_regions = 0;
  std::vector<RegionInfo> info;
  std::vector<int> node_of_tok;  // token id -> node
  std::vector<int> tok_of_node;  // node -> token id or -1

  int region_of_dart(int d) const { return region_of_face[face[d]]; }
};

struct Uf {
  std::vector<int> p;
  explicit Uf(int n) : p(n) {
    for (int i = 0; i < n; ++i) p[i] = i;
  }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void join(int x, int y) { p[find(x)] = find(y); }
};

Arr build_arr(const State& s) {
  const Chart& c = *s.c;
  Arr a;
  a.cs = find_crossings(s);

  // nodes: chart vertices, then live tokens, then crossings
  a.node_of_tok.assign(s.tok.size(), -1);
  int n = c.num_vertices();
  for (int id = 0; id < static_cast<int>(s.tok.size()); ++id)
    if (s.tok[id].alive) a.node_of_tok[id] = n++;
  a.crossing_base = n;
  for (auto& x : a.cs.list) x.node = n++;
  a.n_nodes = n;
  a.tok_of_node.assign(a.n_nodes, -1);
  for (int id = 0; id < static_cast<int>(s.tok.size()); ++id)
    if (a.node_of_tok[id] >= 0) a.tok_of_node[a.node_of_tok[id]] = id;

  auto add_edge = [&](int from, int to, bool chart, int curve, int seg) {
    int d = static_cast<int>(a.head.size());
    a.tail.push_back(from);
    a.head.push_back(to);
    a.tail.push_back(to);
    a.head.push_back(from);
    for (int i = 0; i < 2; ++i) {
      a.chart_dart.push_back(chart ? 1 : 0);
      a.dart_curve.push_back(curve);
      a.dart_seg.push_back(seg);
    }
    return d;  // even = forward dart
  };

  // chart segments: per edge, |order|+1 pieces
  std::vector<std::vector<int>> eseg(c.num_edges());
  for (EdgeId e = 0; e < c.num_edges(); ++e) {
    int from = c.edges[e].a;
    for (int id : s.order[e]) {
      eseg[e].push_back(add_edge(from, a.node_of_tok[id], true, -1, -1));
      from = a.node_of_tok[id];
    }
    eseg[e].push_back(add_edge(from, c.edges[e].b, true, -1, -1));
  }
  // curve sub-segments: each chord, split at its crossings in along-order
  std::map<int, std::vector<int>> sub;  // token -> forward dart chain
  for (int id = 0; id < static_cast<int>(s.tok.size()); ++id) {
    if (!s.tok[id].alive) continue;
    int from = a.node_of_tok[id];
    std::vector<int>& chain = sub[id];
    auto it = a.cs.along.find(id);
    if (it != a.cs.along.end())
      for (int ci : it->second) {
        chain.push_back(
            add_edge(from, a.cs.list[ci].node, false, s.tok[id].curve, id));
        from = a.cs.list[ci].node;
      }
    chain.push_back(add_edge(from, a.node_of_tok[s.tok[id].next], false,
                             s.tok[id].curve, id));
  }

  // rotations (all counterclockwise)
  a.rot.assign(a.n_nodes, {});
  for (VertexId v = 0; v < c.num_vertices(); ++v) {
    for (EdgeId e : c.spokes(v)) {
      const Edge& ed = c.edges[e];
      CK_CHECK(ed.a != ed.b, "loop edge unsupported");
      if (ed.a == v)
        a.rot[v].push_back(eseg[e].front());
      else
        a.rot[v].push_back(eseg[e].back() ^ 1);
    }
  }
  for (int id = 0; id < static_cast<int>(s.tok.size()); ++id) {
    if (!s.tok[id].alive) continue;
    EdgeId e = s.tok[id].edge;
    int i = s.idx_in(id);
    TriId before = s.tok[s.tok[id].prev].seg_tri;
    TriId after = s.tok[id].seg_tri;
    CK_CHECK(before != after, "strand does not cross its edge");
    int toward_b = eseg[e][i + 1];
    int toward_a = eseg[e][i] ^ 1;
    int into_after = sub[id].front();
    int into_before = sub[s.tok[id].prev].back() ^ 1;
    TriId lt = left_tri(c, e);
    CK_CHECK(before == lt || after == lt, "edge sides mislabeled");
    int into_left = (after == lt) ? into_after : into_before;
    int into_right = (after == lt) ? into_before : into_after;
    a.rot[a.node_of_tok[id]] = {toward_b, into_left, toward_a, into_right};
  }
  for (const Cross& x : a.cs.list) {
    // four rays, CCW = order of the chord endpoints around the triangle
    auto dart_toward = [&](int tok_id, bool to_chord_start) -> int {
      const auto& chain = sub[tok_id];
      for (size_t j = 0; j + 1 < chain.size(); ++j) {
        if (a.head[chain[j]] == x.node)
          return to_chord_start ? (chain[j] ^ 1) : chain[j + 1];
      }
      CK_CHECK(false, "crossing not on its chord");
      return -1;
    };
    std::array<std::pair<long long, int>, 4> rays = {
        std::make_pair(x.ra1, dart_toward(x.sa, true)),
        std::make_pair(x.ra2, dart_toward(x.sa, false)),
        std::make_pair(x.rb1, dart_toward(x.sb, true)),
        std::make_pair(x.rb2, dart_toward(x.sb, false))};
    std::sort(rays.begin(), rays.end());
    for (auto& r : rays) a.rot[x.node].push_back(r.second);
  }

  const int nd = static_cast<int>(a.head.size());
  a.rotpos.assign(nd, -1);
  for (int v = 0; v < a.n_nodes; ++v)
    for (size_t i = 0; i < a.rot[v].size(); ++i) {
      CK_CHECK(a.tail[a.rot[v][i]] == v, "rotation lists a foreign dart");
      a.rotpos[a.rot[v][i]] = static_cast<int>(i);
    }
  for (int d = 0; d < nd; ++d)
    CK_CHECK(a.rotpos[d] >= 0, "dart missing from rotation");

  // faces of the rotation system: next = previous-in-rotation of the twin
  a.nxt.assign(nd, -1);
  for (int d = 0; d < nd; ++d) {
    int tw = d ^ 1;
    const auto& r = a.rot[a.tail[tw]];
    int m = static_cast<int>(r.size());
    a.nxt[d] = r[(a.rotpos[tw] + m - 1) % m];
  }
  a.face.assign(nd, -1);
  for (int d = 0; d < nd; ++d) {
    if (a.face[d] >= 0) continue;
    int f = a.n_faces++;
    for (int x = d; a.face[x] < 0; x = a.nxt[x]) a.face[x] = f;
  }
  CK_CHECK(a.n_nodes - nd / 2 + a.n_faces == 2, "arrangement is not a sphere");

  // regions: faces glued across chart segments
  Uf uf(a.n_faces);
  for (int d = 0; d < nd; ++d)
    if (a.chart_dart[d]) uf.join(a.face[d], a.face[d ^ 1]);
  a.region_of_face.assign(a.n_faces, -1);
  std::vector<int> dense(a.n_faces, -1);
  for (int f = 0; f < a.n_faces; ++f) {
    int r = uf.find(f);
    if (dense[r] < 0) {
      dense[r] = a.n_regions++;
      a.info.push_back(RegionInfo{});
    }
    a.region_of_face[f] = dense[r];
  }

  std::vector<long long> darts_in(a.n_regions, 0), chart_in(a.n_regions, 0);
  for (int d = 0; d < nd; ++d) {
    int r = a.region_of_face[a.face[d]];
    darts_in[r]++;
    if (a.chart_dart[d]) chart_in[r]++;
    if (a.head[d] >= a.crossing_base) a.info[r].corners++;
  }
  for (int f = 0; f < a.n_faces; ++f) a.info[a.region_of_face[f]].faces++;
  for (VertexId v = 0; v < c.num_vertices(); ++v) {
    CK_CHECK(!a.rot[v].empty(), "isolated chart vertex");
    int r = a.region_of_dart(a.rot[v][0]);
    if (c.vertices[v].is_puncture)
      a.info[r].punctures.push_back(v);
    else
      a.info[r].unmarked.push_back(v);
  }
  // Euler characteristic of each closed-up region, as a CW complex: cells =
  // faces, darts modulo gluing, corner slots modulo gluing.  The slot of a
  // dart is the face corner after it, sitting at its head; gluing a chart
  // segment identifies that corner with the one after the twin's face-
  // predecessor on the other side.
  std::vector<int> prv(nd, -1);
  for (int d = 0; d < nd; ++d) prv[a.nxt[d]] = d;
  Uf slots(nd);
  for (int d = 0; d < nd; ++d)
    if (a.chart_dart[d]) slots.join(d, prv[d ^ 1]);
  std::vector<std::map<int, char>> seen(a.n_regions);
  std::vector<long long> vcount(a.n_regions, 0);
  for (int d = 0; d < nd; ++d) {
    int r = a.region_of_face[a.face[d]];
    int rep = slots.find(d);
    if (!seen[r].count(rep)) {
      seen[r][rep] = 1;
      vcount[r]++;
    }
  }
  for (int r = 0; r < a.n_regions; ++r) {
    // every curve dart is a boundary edge of its own; every glued chart pair
    // is one interior edge
    long long cells_e = (darts_in[r] - chart_in[r]) + chart_in[r] / 2;
    a.info[r].chi = vcount[r] - cells_e + a.info[r].faces;
  }
  return a;
}

// ---------------------------------------------------------------------------
// Isotopies.

// Removes same-edge hairpins p -> next(p) whose feet are adjacent in the edge
// order (nothing at all between them), folding the strand across the edge;
// repeats to a fixed point.  Adjacency in the full order keeps the fold a
// clean isotopy of the joint picture, and it never increases the crossing
// count: strands through the swept quadrilateral lose a crossing or keep one.
void remove_backtracks(State& s) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int p = 0; p < static_cast<int>(s.tok.size()); ++p) {
      if (!s.tok[p].alive) continue;
      int q = s.tok[p].next;
      if (q == p || s.tok[p].edge != s.tok[q].edge) continue;
      int ip = s.idx_in(p), iq = s.idx_in(q);
      if (ip > iq) std::swap(ip, iq);
      if (iq - ip != 1) continue;
      int o = s.tok[p].prev, nn = s.tok[q].next;
      s.erase_from_order(q);
      s.erase_from_order(p);
      s.tok[p].alive = s.tok[q].alive = false;
      changed = true;
      if (o == q) continue;  // the whole component was this hairpin
      CK_CHECK(s.tok[o].seg_tri == s.tok[q].seg_tri,
               "hairpin does not fold into one triangle");
      s.tok[o].next = nn;
      s.tok[nn].prev = o;
    }
  }
}

// One empty two-corner region removed (the strand of one curve is rerouted
// alongside the other); false when the picture has none left.  Every call
// removes exactly two crossings.
bool remove_one_bigon(State& s) {
  Arr a = build_arr(s);
  int target = -1;
  for (int r = 0; r < a.n_regions; ++r)
    if (a.info[r].corners == 2 && a.info[r].chi == 1 &&
        a.info[r].punctures.empty()) {
      target = r;
      break;
    }
  if (target < 0) return false;

  const Chart& c = *s.c;
  auto next_region_dart = [&](int d) {
    int e = a.nxt[d];
    while (a.chart_dart[e]) e = a.nxt[e ^ 1];
    return e;
  };
  int start = -1;
  for (int d = 0; d < static_cast<int>(a.head.size()); ++d)
    if (!a.chart_dart[d] && a.region_of_dart(d) == target) {
      start = d;
      break;
    }
  CK_CHECK(start >= 0, "two-corner region without curve boundary");
  std::vector<int> cycle;
  for (int d = start;;) {
    cycle.push_back(d);
    CK_CHECK(cycle.size() <= a.head.size(), "region boundary does not close");
    d = next_region_dart(d);
    if (d == start) break;
  }
  std::vector<int> corner_pos;
  for (size_t i = 0; i < cycle.size(); ++i)
    if (a.head[cycle[i]] >= a.crossing_base)
      corner_pos.push_back(static_cast<int>(i));
  CK_CHECK(corner_pos.size() == 2, "disc boundary with wrong corner count");

  struct Chain {
    std::vector<int> darts;
    int curve = -1;
    bool word_forward = false;
    std::vector<int> inner;  // tokens passed through, in chain order
    int seg_first = -1, seg_last = -1;
  };
  auto make_chain = [&](int from_pos, int to_pos) {
    Chain ch;
    int m = static_cast<int>(cycle.size());
    for (int i = (from_pos + 1) % m;; i = (i + 1) % m) {
      ch.darts.push_back(cycle[i]);
      if (i == to_pos) break;
    }
    ch.curve = a.dart_curve[ch.darts.front()];
    for (int d : ch.darts)
      CK_CHECK(a.dart_curve[d] == ch.curve, "region side switches curve");
    ch.word_forward = (ch.darts.front() % 2) == 0;
    for (size_t i = 0; i + 1 < ch.darts.size(); ++i) {
      int h = a.head[ch.darts[i]];
      CK_CHECK(h >= c.num_vertices() && h < a.crossing_base,
               "chain interior is not a strand point");
      ch.inner.push_back(a.tok_of_node[h]);
    }
    ch.seg_first = a.dart_seg[ch.darts.front()];
    ch.seg_last = a.dart_seg[ch.darts.back()];
    return ch;
  };
  Chain ch1 = make_chain(corner_pos[0], corner_pos[1]);
  Chain ch2 = make_chain(corner_pos[1], corner_pos[0]);
  CK_CHECK(ch1.curve != ch2.curve, "two-corner region bounded by one curve");

  TriId tri_c1 = a.cs.list[a.head[cycle[corner_pos[0]]] - a.crossing_base].t;
  TriId tri_c2 = a.cs.list[a.head[cycle[corner_pos[1]]] - a.crossing_base].t;

  // Reroute ch1's curve: cut out its pass through the region and replace it
  // with a parallel copy of ch2's side, just beyond ch2.
  int pred, succ;
  std::vector<int> removed;  // word-forward
  if (ch1.word_forward) {
    pred = ch1.seg_first;
    succ = s.tok[ch1.seg_last].next;
    removed = ch1.inner;
  } else {
    pred = ch1.seg_last;
    succ = s.tok[ch1.seg_first].next;
    removed = std::vector<int>(ch1.inner.rbegin(), ch1.inner.rend());
  }
  {  // the chain must agree with the word between its anchors
    int id = s.tok[pred].next;
    for (int r : removed) {
      CK_CHECK(id == r, "chain tokens disagree with the word");
      id = s.tok[id].next;
    }
    CK_CHECK(id == succ, "chain does not land on its anchor");
  }

  std::vector<int> src;  // ch2's inner tokens, in ch1-word-forward order
  if (ch1.word_forward)
    src = std::vector<int>(ch2.inner.rbegin(), ch2.inner.rend());
  else
    src = ch2.inner;
  TriId first_tri = ch1.word_forward ? tri_c1 : tri_c2;
  TriId last_tri = ch1.word_forward ? tri_c2 : tri_c1;

  // Insertion side per source token: the clone goes on the side of the other
  // strand away from the collapsing region.  Token rotations are built as
  // {toward_b, into_left, toward_a, into_right}.
  std::vector<int> side_after(src.size(), 0);
  for (size_t i = 0; i < src.size(); ++i) {
    int node = a.node_of_tok[src[i]];
    int toward_b = a.rot[node][0];
    int toward_a = a.rot[node][2];
    if (a.region_of_dart(toward_a) == target) {
      CK_CHECK(a.region_of_dart(toward_b) != target,
               "region on both sides of an edge point");
      side_after[i] = 1;  // region reaches a-ward of the point, clone b-ward
    } else {
      CK_CHECK(a.region_of_dart(toward_b) == target,
               "region does not touch the strand point");
      side_after[i] = 0;
    }
  }

  for (int r : removed) {
    s.erase_from_order(r);
    s.tok[r].alive = false;
  }
  int cur = pred;
  TriId pending_tri = first_tri;
  for (size_t i = 0; i < src.size(); ++i) {
    int q = src[i];
    int id = s.alloc(s.tok[q].edge, ch1.curve);
    auto& ord = s.order[s.tok[q].edge];
    int iq = s.idx_in(q);
    ord.insert(ord.begin() + iq + side_after[i], id);
    s.tok[cur].next = id;
    s.tok[id].prev = cur;
    s.tok[cur].seg_tri = pending_tri;
    if (i + 1 < src.size()) {
      int q2 = src[i + 1];
      if (s.tok[q].next == q2)
        pending_tri = s.tok[q].seg_tri;
      else {
        CK_CHECK(s.tok[q2].next == q, "clone sources are not word-adjacent");
        pending_tri = s.tok[q2].seg_tri;
      }
    }
    cur = id;
  }
  s.tok[cur].next = succ;
  s.tok[succ].prev = cur;
  if (src.empty()) {
    CK_CHECK(first_tri == last_tri, "short-cut spans two triangles");
    s.tok[cur].seg_tri = first_tri;
  } else {
    s.tok[cur].seg_tri = last_tri;
  }

  remove_backtracks(s);
  check_embedded(s);
  return true;
}

Weights weights_of(const State& s, int curve) {
  Weights w(s.c->num_edges());
  for (const auto& t : s.tok)
    if (t.alive && t.curve == curve) w.w[t.edge] += 1;
  return w;
}

State extract_curve(const State& s, int curve) {
  State out;
  out.c = s.c;
  out.order.assign(s.c->num_edges(), {});
  std::vector<int> remap(s.tok.size(), -1);
  for (int id = 0; id < static_cast<int>(s.tok.size()); ++id)
    if (s.tok[id].alive && s.tok[id].curve == curve)
      remap[id] = out.alloc(s.tok[id].edge, 0);
  for (int id = 0; id < static_cast<int>(s.tok.size()); ++id)
    if (remap[id] >= 0) {
      CK_CHECK(remap[s.tok[id].next] >= 0, "curve word leaves the curve");
      out.tok[remap[id]].next = remap[s.tok[id].next];
      out.tok[remap[id]].prev = remap[s.tok[id].prev];
      out.tok[remap[id]].seg_tri = s.tok[id].seg_tri;
    }
  for (EdgeId e = 0; e < s.c->num_edges(); ++e)
    for (int id : s.order[e])
      if (remap[id] >= 0) out.order[e].push_back(remap[id]);
  return out;
}

void reduce_state(State& s) {
  remove_backtracks(s);
  while (remove_one_bigon(s)) {
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Public oracle API.

struct UnitOverlay::Impl {
  State s;
  bool reduced = false;
};

UnitOverlay::UnitOverlay(const Chart& c, const Weights& a, const Weights& b) {
  std::string why;
  CK_CHECK(admissible(c, a, &why), "first system: " + why);
  CK_CHECK(admissible(c, b, &why), "second system: " + why);
  Weights ta = a, tb = b;
  pole_tighten(c, ta);
  pole_tighten(c, tb);
  impl_ = std::make_unique<Impl>();
  impl_->s = build_state(c, ta, tb);
  check_embedded(impl_->s);
}

UnitOverlay::~UnitOverlay() = default;
UnitOverlay::UnitOverlay(UnitOverlay&&) noexcept = default;
UnitOverlay& UnitOverlay::operator=(UnitOverlay&&) noexcept = default;

void UnitOverlay::reduce() {
  reduce_state(impl_->s);
  impl_->reduced = true;
}

long long UnitOverlay::crossings() const {
  return static_cast<long long>(find_crossings(impl_->s).list.size());
}

std::vector<RegionInfo> UnitOverlay::regions() const {
  return build_arr(impl_->s).info;
}

bool UnitOverlay::fills() const {
  CK_CHECK(impl_->reduced, "fills() called before reduce()");
  for (const RegionInfo& r : regions())
    if (r.chi != 1 || r.punctures.size() > 1) return false;
  return true;
}

Int unit_intersection(const Chart& c, const Weights& a, const Weights& b) {
  UnitOverlay ov(c, a, b);
  ov.reduce();
  long long n = ov.crossings();
  CK_CHECK(n % 2 == 0, "odd crossing count between closed curves");
  return Int(n);
}

bool unit_fills(const Chart& c, const Weights& a, const Weights& b) {
  CK_CHECK(is_single_essential_curve(c, a), "first input is not a curve");
  CK_CHECK(is_single_essential_curve(c, b), "second input is not a curve");
  UnitOverlay ov(c, a, b);
  ov.reduce();
  return ov.fills();
}

Weights unit_twist(const Chart& c, const Weights& core, const Weights& target,
                   long long e) {
  CK_CHECK(is_single_essential_curve(c, core), "twist core is not a curve");
  std::string why;
  CK_CHECK(admissible(c, target, &why), "twist target: " + why);
  Weights tcore = core;
  pole_tighten(c, tcore);
  Weights cur = target;
  pole_tighten(c, cur);
  if (e == 0 || cur.is_zero()) return cur;
  const size_t n_comp = trace_components(c, cur).components.size();
  const int hand = e > 0 ? 1 : -1;

  for (long long rep = 0; rep < (e > 0 ? e : -e); ++rep) {
    State s = build_state(c, tcore, cur);
    check_embedded(s);
    reduce_state(s);
    CrossSet cs = find_crossings(s);
    if (cs.list.empty()) return cur;  // disjoint: twisting changes nothing

    // the core's word and positions in it
    std::vector<int> wc;
    std::vector<int> posc(s.tok.size(), -1);
    for (int id = 0; id < static_cast<int>(s.tok.size()) && wc.empty(); ++id)
      if (s.tok[id].alive && s.tok[id].curve == 0)
        for (int x = id; posc[x] < 0; x = s.tok[x].next) {
          posc[x] = static_cast<int>(wc.size());
          wc.push_back(x);
        }
    const int n = static_cast<int>(wc.size());
    CK_CHECK(n > 0, "core traced to nothing");

    // target components
    std::vector<std::vector<int>> comps;
    {
      std::vector<char> seen(s.tok.size(), 0);
      for (int id = 0; id < static_cast<int>(s.tok.size()); ++id) {
        if (!s.tok[id].alive || s.tok[id].curve != 1 || seen[id]) continue;
        comps.emplace_back();
        for (int x = id; !seen[x]; x = s.tok[x].next) {
          seen[x] = 1;
          comps.back().push_back(x);
        }
      }
    }

    // Splice a full parallel copy of the core into the target at every
    // crossing.  In a collar of the core the twist is one shear map, so all
    // the copies are parallel translates of a single helix: each sits at a
    // "phase" equal to its winding distance from its crossing, measured along
    // the twist direction, and they stack on one common flank of the core in
    // phase order.  Reading a copy from its host strand's entry token runs
    // through the phases upward or downward depending on which flank that
    // token lies on; the end class only depends on the spliced word.
    const long long period = 3 * rank_stride(s);
    auto enters_right = [&](const Cross& x) {
      // the entry endpoint inside the counterclockwise boundary arc from the
      // core chord's start to its end lies right of the core's direction
      return ((x.rb1 - x.ra1 + period) % period) <
             ((x.ra2 - x.ra1 + period) % period);
    };
    struct CloneKey {
      long long phase, tie;
      int id;
    };
    std::map<int, std::vector<CloneKey>> at;  // core token -> clones near it
    struct Rewire {
      std::vector<int> word;
      std::vector<TriId> tri;
    };
    std::vector<Rewire> plans;
    for (const auto& comp : comps) {
      Rewire plan;
      bool touched = false;
      for (int u : comp) {
        plan.word.push_back(u);
        plan.tri.push_back(s.tok[u].seg_tri);
        auto it = cs.along.find(u);
        if (it == cs.along.end()) continue;
        touched = true;
        for (int ci : it->second) {
          const Cross& x = cs.list[ci];
          CK_CHECK(x.sb == u, "crossing filed on the wrong curve");
          int ccore = x.sa;
          long long along_idx = 0;
          const auto& on_core = cs.along[ccore];
          for (size_t k = 0; k < on_core.size(); ++k)
            if (on_core[k] == ci) along_idx = static_cast<long long>(k);
          const bool asc = (hand > 0) == enters_right(x);
          for (int step = 0; step < n; ++step) {
            int src;
            if (asc)
              src = wc[(posc[s.tok[ccore].next] + step) % n];
            else
              src = wc[(posc[ccore] - (step % n) + n) % n];
            long long phase = hand > 0
                                  ? (posc[src] - posc[ccore] - 1 + n) % n
                                  : (posc[ccore] - posc[src] + n) % n;
            long long tie = hand > 0 ? -along_idx : along_idx;
            int nid = s.alloc(s.tok[src].edge, 1);
            at[src].push_back(CloneKey{phase, tie, nid});
            plan.word.push_back(nid);
            TriId tri;
            if (step + 1 < n)
              tri = asc ? s.tok[src].seg_tri : s.tok[s.tok[src].prev].seg_tri;
            else
              tri = x.t;
            plan.tri.push_back(tri);
          }
        }
      }
      if (touched) plans.push_back(std::move(plan));
    }
    // place clones into the edge orders on the core's left flank, farthest
    // phase first, so the last insert (smallest phase) ends up adjacent to
    // the core strand: the shared helix crosses the core at phase zero
    for (auto& [src, clones] : at) {
      std::sort(clones.begin(), clones.end(),
                [](const CloneKey& l, const CloneKey& r) {
                  if (l.phase != r.phase) return l.phase > r.phase;
                  return l.tie > r.tie;
                });
      EdgeId e2 = s.tok[src].edge;
      const bool insert_before = s.tok[src].seg_tri == left_tri(c, e2);
      for (const CloneKey& ck : clones) {
        auto& ord = s.order[e2];
        int i = s.idx_in(src);
        ord.insert(ord.begin() + i + (insert_before ? 0 : 1), ck.id);
      }
    }
    for (const Rewire& plan : plans) {
      int m = static_cast<int>(plan.word.size());
      for (int i = 0; i < m; ++i) {
        int id = plan.word[i], nid = plan.word[(i + 1) % m];
        s.tok[id].next = nid;
        s.tok[nid].prev = id;
        s.tok[id].seg_tri = plan.tri[i];
      }
    }

    State alone = extract_curve(s, 1);
    remove_backtracks(alone);
    check_embedded(alone);
    cur = weights_of(alone, 0);
    CK_CHECK(admissible(c, cur, &why), "twist output: " + why);
    pole_tighten(c, cur);
  }
  CK_CHECK(trace_components(c, cur).components.size() == n_comp,
           "twist changed the component count");
  return cur;
}

TraceResult trace_components(const Chart& c, const Weights& w) {
  std::string why;
  CK_CHECK(admissible(c, w, &why), why);
  Weights tw = w;
  pole_tighten(c, tw);
  TraceResult res;
  if (tw.is_zero()) return res;
  for (const UnitWord& uw : walk_units(c, tw)) {
    TraceComponent comp;
    comp.word = uw.edges;
    comp.weights = Weights(c.num_edges());
    for (EdgeId e : uw.edges) comp.weights.w[e] += 1;
    Weights canon = comp.weights;
    pole_tighten(c, canon);
    CK_CHECK(canon == comp.weights, "component of a tight system is not tight");
    for (VertexId v = 0; v < c.num_vertices(); ++v)
      if (c.vertices[v].is_puncture && comp.weights == puncture_link(c, v)) {
        comp.peripheral = true;
        comp.around = v;
      }
    res.components.push_back(std::move(comp));
  }
  return res;
}

bool is_single_essential_curve(const Chart& c, const Weights& w) {
  TraceResult r = trace_components(c, w);
  return r.components.size() == 1 && !r.components[0].peripheral;
}

}  // namespace curvekit
