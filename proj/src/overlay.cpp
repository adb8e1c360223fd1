#include "curvekit/overlay.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "engine_internal.hpp"

namespace curvekit {
namespace internal {

std::vector<ProbeStep> probe_steps(const Chart& c, const UnitWord& u) {
  const int L = static_cast<int>(u.edges.size());
  std::vector<ProbeStep> ps(L);
  for (int i = 0; i < L; ++i) {
    ProbeStep& s = ps[i];
    s.e = u.edges[i];
    s.t = u.tri[i];
    s.k = side_with_edge(c, s.t, s.e);
    s.fwd = side_forward(c, s.t, s.k);
    EdgeId enext = u.edges[(i + 1) % L];
    int k2 = side_with_edge(c, s.t, enext);
    CK_CHECK(k2 != s.k, "probe chord returns to its own side");
    s.turn_low = (k2 == (s.k + 2) % 3);
    s.k_out = k2;
    s.e_out = enext;
    s.fwd_out = side_forward(c, s.t, k2);
    CK_CHECK(c.neighbor(s.t, k2).tri == u.tri[(i + 1) % L],
             "probe word skips a triangle");
  }
  return ps;
}

namespace {

// One trip of the tied interval around the probe word.  The interval is held
// in edge order ('a' endpoint first) as rank boundaries [lo, hi); `flip` says
// whether that axis currently runs opposite to the axis at the walk's start,
// transported along the strip of still-tied strands.  Returns false when the
// interval empties (every field strand on the start edge is decided).
struct TripRec {
  Int lo, hi;            // entry state
  bool f = false;
  std::vector<Int> llo, lhi;  // per-step local interval before the split
  std::vector<int> cat;       // 0: below the split, 1: straddling, 2: above
  Int inc = 0;           // strands decided below the probe during the trip
};

bool run_trip(const Field& fld, const std::vector<ProbeStep>& ps, int start,
              Int& lo, Int& hi, bool& flip, Int& cnt, TripRec* rec) {
  const int L = static_cast<int>(ps.size());
  for (int j = 0; j < L; ++j) {
    const ProbeStep& st = ps[(start + j) % L];
    const Int& m = fld.m[st.e];
    Int llo = st.fwd ? lo : m - hi;
    Int lhi = st.fwd ? hi : m - lo;
    bool lf = flip != !st.fwd;
    const Int& cc = fld.cc[st.t][st.k];
    if (rec) {
      rec->llo.push_back(llo);
      rec->lhi.push_back(lhi);
      rec->cat.push_back(lhi <= cc ? 0 : (llo >= cc ? 2 : 1));
    }
    Int keep_lo, keep_hi, div_lo, div_hi;
    bool div_above;
    if (st.turn_low) {
      keep_lo = llo;
      keep_hi = std::min(lhi, cc);
      div_lo = std::max(llo, cc);
      div_hi = lhi;
      div_above = true;
    } else {
      keep_lo = std::max(llo, cc);
      keep_hi = lhi;
      div_lo = llo;
      div_hi = std::min(lhi, cc);
      div_above = false;
    }
    if (div_hi > div_lo && div_above == lf) {
      cnt += div_hi - div_lo;
      if (rec) rec->inc += div_hi - div_lo;
    }
    if (keep_hi <= keep_lo) return false;
    // through the corner: strand p maps to C - 1 - p, reversing the axis
    const Int& m2 = fld.m[st.e_out];
    Int a2, b2;
    if (st.turn_low) {
      a2 = m2 - keep_hi;
      b2 = m2 - keep_lo;
    } else {
      a2 = m - keep_hi;
      b2 = m - keep_lo;
    }
    lf = !lf;
    if (st.fwd_out) {
      lo = a2;
      hi = b2;
      flip = lf;
    } else {
      lo = m2 - b2;
      hi = m2 - a2;
      flip = !lf;
    }
    CK_CHECK(lo >= 0 && hi <= m2, "tied interval left its edge");
  }
  return true;
}

}  // namespace

std::optional<Int> last_n_le(const Int& value, const Int& slope,
                             const Int& limit) {
  if (slope <= 0) return std::nullopt;
  return (limit - value) / slope;
}
std::optional<Int> last_n_ge(const Int& value, const Int& slope,
                             const Int& limit) {
  if (slope >= 0) return std::nullopt;
  return (value - limit) / (-slope);
}

void tighten_bound(std::optional<Int>& bound, const std::optional<Int>& nb) {
  if (!nb) return;
  if (!bound || *nb < *bound) bound = *nb;
}

Int rank_at(const Chart& c, const Field& fld,
            const std::vector<ProbeStep>& ps, int start) {
  const ProbeStep& s0 = ps[start];
  Int lo = 0, hi = fld.m[s0.e];
  bool flip = false;
  Int cnt = 0;
  if (hi == 0) return cnt;
  std::optional<TripRec> prev;
  for (long long phase = 0;; ++phase) {
    CK_CHECK(phase < 300000, "rank walk failed to stabilize");
    TripRec rec;
    rec.lo = lo;
    rec.hi = hi;
    rec.f = flip;
    if (!run_trip(fld, ps, start, lo, hi, flip, cnt, &rec)) return cnt;
    if (lo == rec.lo && hi == rec.hi && flip == rec.f) {
      // never decides: parallel copies, placed on the probe's left, which is
      // the low side exactly when the probe crosses into the left triangle
      CK_CHECK(rec.inc == 0, "stationary interval decided strands");
      if (s0.t == left_tri(c, s0.e)) cnt += hi - lo;
      return cnt;
    }
    if (std::getenv("CK_NO_ACCEL") == nullptr &&  // TEMP: debug bypass
        prev && prev->cat == rec.cat && prev->f == rec.f &&
        lo - rec.lo == rec.lo - prev->lo && hi - rec.hi == rec.hi - prev->hi) {
      // two trips with one clip pattern: boundaries and per-trip counts are
      // affine in the trip index until some comparison flips — jump there
      const int L = static_cast<int>(ps.size());
      std::optional<Int> best;  // largest valid ν, counting rec's trip as 0
      for (int j = 0; j < L; ++j) {
        const ProbeStep& st = ps[(start + j) % L];
        const Int& cc = fld.cc[st.t][st.k];
        const Int& m = fld.m[st.e];
        Int sx = rec.llo[j] - prev->llo[j];
        Int sy = rec.lhi[j] - prev->lhi[j];
        tighten_bound(best, last_n_ge(rec.llo[j], sx, Int(0)));
        tighten_bound(best, last_n_le(rec.lhi[j], sy, m));
        switch (rec.cat[j]) {
          case 0:
            tighten_bound(best, last_n_le(rec.lhi[j], sy, cc));
            break;
          case 2:
            tighten_bound(best, last_n_ge(rec.llo[j], sx, cc));
            break;
          default:
            tighten_bound(best, last_n_le(rec.llo[j], sx, cc - 1));
            tighten_bound(best, last_n_ge(rec.lhi[j], sy, cc + 1));
        }
        // keep the interval nonempty through the step
        if (sy - sx < 0)
          tighten_bound(best, (rec.lhi[j] - rec.llo[j] - 1) / (sx - sy));
      }
      CK_CHECK(best.has_value(), "drifting interval admits no bound");
      if (*best >= 1) {
        const Int V = *best;  // trips ν = 1..V run with the recorded pattern
        Int dinc = rec.inc - prev->inc;
        cnt += V * rec.inc + dinc * (V * (V + 1) / 2);
        lo += V * (rec.lo - prev->lo);
        hi += V * (rec.hi - prev->hi);
        prev.reset();
        continue;
      }
    }
    prev = std::move(rec);
  }
}

std::vector<Int> ranks(const Chart& c, const Field& fld,
                       const std::vector<ProbeStep>& ps) {
  std::vector<Int> out(ps.size());
  for (int i = 0; i < static_cast<int>(ps.size()); ++i)
    out[i] = rank_at(c, fld, ps, i);
  return out;
}

namespace {

Field tightened_field(const Chart& c, Weights& w) {
  pole_tighten(c, w);
  return Field(c, w);
}

}  // namespace

std::array<Int, 3> corner_depths(const Field& fld, TriId t, int side,
                                 const Int& rho) {
  std::array<Int, 3> out{Int(0), Int(0), Int(0)};
  const Int& c_lo = fld.cc[t][side];
  const Int& c_hi = fld.cc[t][(side + 1) % 3];
  Int m = c_lo + c_hi;
  out[side] = c_lo > rho ? Int(c_lo - rho) : Int(0);
  out[(side + 1) % 3] = c_hi + rho > m ? Int(c_hi + rho - m) : Int(0);
  return out;
}

Int chord_crossings(const Field& fld, const std::vector<ProbeStep>& ps, int i,
                    const Int& rank_in, const Int& rank_out) {
  const ProbeStep& st = ps[i];
  const Int& m_in = fld.m[st.e];
  const Int& m_out = fld.m[st.e_out];
  Int rho = st.fwd ? rank_in : m_in - rank_in;
  Int tau = st.fwd_out ? rank_out : m_out - rank_out;
  auto P = corner_depths(fld, st.t, st.k, rho);
  auto Q = corner_depths(fld, st.t, st.k_out, tau);
  Int total = 0;
  for (int j = 0; j < 3; ++j) total += P[j] > Q[j] ? P[j] - Q[j] : Q[j] - P[j];
  return total;
}

PairFrame::PairFrame(const Chart& c, Weights probe_in, Weights field_in)
    : chart(&c),
      probe(std::move(probe_in)),
      field(std::move(field_in)),
      f(tightened_field(c, field)) {
  pole_tighten(c, probe);
  std::string why;
  CK_CHECK(admissible(c, probe, &why), "probe not admissible: " + why);
  CK_CHECK(admissible(c, field, &why), "field not admissible: " + why);
  CK_CHECK(probe.total() <= Int(4000000),
           "probe side exceeds the enumeration budget");
  units = walk_units(c, probe);
  crossings = 0;
  for (const auto& u : units) {
    steps.push_back(probe_steps(c, u));
    const auto& ps = steps.back();
    rank.push_back(ranks(c, f, ps));
    const auto& r = rank.back();
    const int L = static_cast<int>(ps.size());
    for (int i = 0; i < L; ++i)
      crossings += chord_crossings(f, ps, i, r[i], r[(i + 1) % L]);
  }
}

}  // namespace internal

namespace {

// Divide out the content of a weight vector: k parallel copies of a system
// meet anything k times as often, so the multiplicity factors out exactly.
Int factor_content(Weights& w) {
  Int g = 0;
  for (const Int& x : w.w) g = boost::multiprecision::gcd(g, x);
  if (g > 1)
    for (Int& x : w.w) x /= g;
  return g > 0 ? g : Int(1);
}

}  // namespace

Int intersection_number(const Chart& c, const Weights& a, const Weights& b) {
  std::string why;
  CK_CHECK(admissible(c, a, &why), "left system not admissible: " + why);
  CK_CHECK(admissible(c, b, &why), "right system not admissible: " + why);
  if (a.is_zero() || b.is_zero()) return 0;
  Weights ra = a, rb = b;
  Int mult = factor_content(ra) * factor_content(rb);
  const bool a_small = ra.total() <= rb.total();
  internal::PairFrame frame(c, a_small ? ra : rb, a_small ? rb : ra);
  return mult * frame.crossings;
}

bool overlaps(const Chart& c, const Weights& a, const Weights& b) {
  return intersection_number(c, a, b) > 0;
}

}  // namespace curvekit
