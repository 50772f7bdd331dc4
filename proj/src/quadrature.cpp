#include "shockfit/quadrature.hpp"

#include <map>
#include <mutex>
#include <numbers>

namespace shockfit::quad {

namespace {

Rule build(int n) {
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace

const Rule& gauss_legendre(int n) {
  switch (n) {
    case 4: { static const Rule r = build(4); return r; }
    case 8: { static const Rule r = build(8); return r; }
    case 12: { static const Rule r = build(12); return r; }
    case 16: { static const Rule r = build(16); return r; }
    case 20: { static const Rule r = build(20); return r; }
    default: break;
  }
  static std::mutex lock;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> g(lock);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build(n)).first;
  return it->second;
}

}  // namespace shockfit::quad
