#include "fracgeo/util.hpp"

#include <cstdlib>
#include <thread>

namespace fracgeo {

std::vector<Vec> fibonacci_sphere_points(int count) {
  if (count < 1) throw InvalidArgument("fibonacci_sphere_points: count < 1");
  std::vector<Vec> pts(static_cast<size_t>(count));
  const double ga = M_PI * (3.0 - std::sqrt(5.0));  // golden angle
  for (int i = 0; i < count; ++i) {
    double z = 1.0 - (2.0 * i + 1.0) / count;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = ga * i;
    pts[static_cast<size_t>(i)] = Vec(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

std::array<Vec, 3> random_rotation(int dim, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::array<Vec, 3> rot{Vec(1, 0, 0), Vec(0, 1, 0), Vec(0, 0, 1)};
  if (dim == 2) {
    double th = 2.0 * M_PI * uni(rng);
    rot[0] = Vec(std::cos(th), std::sin(th));
    rot[1] = Vec(-std::sin(th), std::cos(th));
    return rot;
  }
  // uniform quaternion
  double u1 = uni(rng), u2 = uni(rng), u3 = uni(rng);
  double a = std::sqrt(1.0 - u1) * std::sin(2.0 * M_PI * u2);
  double b = std::sqrt(1.0 - u1) * std::cos(2.0 * M_PI * u2);
  double c = std::sqrt(u1) * std::sin(2.0 * M_PI * u3);
  double d = std::sqrt(u1) * std::cos(2.0 * M_PI * u3);
  rot[0] = Vec(a * a + b * b - c * c - d * d, 2 * (b * c + a * d), 2 * (b * d - a * c));
  rot[1] = Vec(2 * (b * c - a * d), a * a - b * b + c * c - d * d, 2 * (c * d + a * b));
  rot[2] = Vec(2 * (b * d + a * c), 2 * (c * d - a * b), a * a - b * b - c * c + d * d);
  return rot;
}

void solve_dense(std::vector<double>& a, std::vector<double>& b, int n) {
  auto at = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * n + j]; };
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(at(r, col)) > std::fabs(at(piv, col))) piv = r;
    if (std::fabs(at(piv, col)) < 1e-300)
      throw NumericError("solve_dense: singular matrix");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(at(piv, j), at(col, j));
      std::swap(b[static_cast<size_t>(piv)], b[static_cast<size_t>(col)]);
    }
    double inv = 1.0 / at(col, col);
    for (int r = col + 1; r < n; ++r) {
      double f = at(r, col) * inv;
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) at(r, j) -= f * at(col, j);
      b[static_cast<size_t>(r)] -= f * b[static_cast<size_t>(col)];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[static_cast<size_t>(r)];
    for (int j = r + 1; j < n; ++j) s -= at(r, j) * b[static_cast<size_t>(j)];
    b[static_cast<size_t>(r)] = s / at(r, r);
  }
}

int fracgeo_thread_cap() {
  const char* env = std::getenv("FRACGEO_THREADS");
  if (!env) return 1;
  int n = std::atoi(env);
  if (n < 1) return 1;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw > 0 && n > static_cast<int>(hw)) n = static_cast<int>(hw);
  return n;
}

void parallel_for(int n, const std::function<void(int)>& fn, int threads) {
  if (threads <= 0) threads = fracgeo_thread_cap();
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error = nullptr;
  std::mutex err_mtx;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mtx);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fracgeo
