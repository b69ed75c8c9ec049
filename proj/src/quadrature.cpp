#include "hdsched/quadrature.hpp"

#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "hdsched/errors.hpp"
#include "hdsched/numeric.hpp"

namespace hdsched {
namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (positive abscissae).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double fsum = f(c - x) + f(c + x);
    resk += fsum * kWgk[j];
    if (j % 2 == 1) resg += fsum * kWg[j / 2];
  }
  Segment s;
  s.a = a;
  s.b = b;
  s.value = resk * h;
  s.error = std::abs((resk - resg) * h);
  return s;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt, const char* name) {
  if (a == b) return 0.0;
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument(std::string("integrate: bad interval for ") + name);
  }

  std::priority_queue<Segment> queue;
  double total_error = 0.0;
  const int seeds = opt.initial_segments > 0 ? opt.initial_segments : 1;
  for (int i = 0; i < seeds; ++i) {
    const double sa = a + (b - a) * i / seeds;
    const double sb = i + 1 == seeds ? b : a + (b - a) * (i + 1) / seeds;
    if (!(sa < sb)) continue;
    const Segment s = gk15(f, sa, sb);
    total_error += s.error;
    queue.push(s);
  }
  if (queue.empty()) {
    // Interval too narrow to pre-split.
    const Segment s = gk15(f, a, b);
    total_error = s.error;
    queue.push(s);
  }

  int splits = 0;
  while (total_error > opt.abs_tol) {
    if (splits >= opt.max_subdivisions) {
      throw quadrature_error(std::string("integrate: tolerance not reached for ") + name);
    }
    Segment worst = queue.top();
    if (worst.error <= 0.0) break;  // every segment converged; residual is roundoff
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval no longer splittable in floating point; accept its estimate.
      total_error -= worst.error;
      worst.error = 0.0;
      queue.push(worst);
      continue;
    }
    Segment left = gk15(f, worst.a, mid);
    Segment right = gk15(f, mid, worst.b);
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++splits;
  }

  CompensatedSum sum;
  while (!queue.empty()) {
    sum.add(queue.top().value);
    queue.pop();
  }
  return sum.value();
}

}  // namespace hdsched
