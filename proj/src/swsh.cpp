#include "nullcone/swsh.hpp"

#include <map>
#include <mutex>

namespace nullcone {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = xi;
      for (int l = 2; l <= n; ++l) {
        double p2 = ((2 * l - 1) * xi * p1 - (l - 1) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      double dx = p1 / dp;
      xi -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = xi;
    for (int l = 2; l <= n; ++l) {
      double p2 = ((2 * l - 1) * xi * p1 - (l - 1) * p0) / l;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
    x[i] = xi;
    w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
}

// Seed d^{j}_{mn} at j = max(|m|,|n|): the Wigner sum collapses to a single
// term, so lgamma is safe (no cancellation).
double wigner_seed(int j, int m, int n, double ch, double sh) {
  int kmin = std::max(0, n - m);
  // single term k = kmin
  int k = kmin;
  double lognorm = 0.5 * (std::lgamma(j + m + 1.0) + std::lgamma(j - m + 1.0) +
                          std::lgamma(j + n + 1.0) + std::lgamma(j - n + 1.0));
  double logden = std::lgamma(j + n - k + 1.0) + std::lgamma(k + 1.0) +
                  std::lgamma(j - k - m + 1.0) + std::lgamma(k - n + m + 1.0);
  int pc = 2 * j - 2 * k + n - m;  // power of cos(theta/2)
  int ps = 2 * k - n + m;          // power of sin(theta/2)
  double mag = std::exp(lognorm - logden);
  double sign = ((k - n + m) % 2 == 0) ? 1.0 : -1.0;
  return sign * mag * std::pow(ch, pc) * std::pow(sh, ps);
}

}  // namespace

double wigner_d(int l, int m, int n, double theta) {
  int j0 = std::max(std::abs(m), std::abs(n));
  if (l < j0) return 0.0;
  double ch = std::cos(0.5 * theta), sh = std::sin(0.5 * theta);
  double x = std::cos(theta);
  double dcur = wigner_seed(j0, m, n, ch, sh);
  if (l == j0) return dcur;
  double dprev = 0.0;
  int lstart = j0;
  if (j0 == 0) {  // m = n = 0: the generic step is 0/0 at ll = 0
    dprev = dcur;
    dcur = x;  // d^1_{00} = cos(theta)
    if (l == 1) return dcur;
    lstart = 1;
  }
  for (int ll = lstart; ll < l; ++ll) {
    double a = (2 * ll + 1) * (ll * (ll + 1.0) * x - double(m) * n);
    double b = (ll + 1.0) *
               std::sqrt(double(ll * ll - m * m)) *
               std::sqrt(double(ll * ll - n * n));
    double c = ll * std::sqrt(double((ll + 1) * (ll + 1) - m * m)) *
               std::sqrt(double((ll + 1) * (ll + 1) - n * n));
    double dnext = (a * dcur - b * dprev) / c;
    dprev = dcur;
    dcur = dnext;
  }
  return dcur;
}

SwshEngine::SwshEngine(int L) : L_(L), ntheta_(L + 1), nphi_(2 * L + 1) {
  if (L < 2) throw std::invalid_argument("SwshEngine: band limit must be >= 2");
  std::vector<double> xw, ww;
  gauss_legendre(ntheta_, xw, ww);
  x_ = xw;
  theta_.resize(ntheta_);
  w_.resize(ntheta_);
  for (int j = 0; j < ntheta_; ++j) {
    theta_[j] = std::acos(x_[j]);
    w_[j] = ww[j] * (2.0 * M_PI / nphi_);
  }
  build_tables();
}

void SwshEngine::build_tables() {
  lam_.assign(7, {});
  for (int spin = -3; spin <= 3; ++spin) {
    auto& tab = lam_[spin + 3];
    tab.assign(ncoef(), {});
    for (int l = std::abs(spin); l <= L_; ++l) {
      double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * M_PI));
      double sgn = (spin % 2 == 0) ? 1.0 : -1.0;
      for (int m = -l; m <= l; ++m) {
        auto& col = tab[idx(l, m)];
        col.resize(ntheta_);
        for (int j = 0; j < ntheta_; ++j)
          col[j] = sgn * norm * wigner_d(l, m, -spin, theta_[j]);
      }
    }
  }
}

cplx SwshEngine::harmonic(int spin, int l, int m, int j, int k) const {
  double lam = lam_[spin + 3][idx(l, m)][j];
  double ph = m * phi(k);
  return lam * cplx(std::cos(ph), std::sin(ph));
}

std::vector<cplx> SwshEngine::analyze(int spin, const std::vector<cplx>& grid) const {
  if (grid.size() != ngrid())
    throw std::invalid_argument("SwshEngine::analyze: grid size mismatch");
  // phi DFT per theta row
  std::vector<cplx> fm(std::size_t(ntheta_) * (2 * L_ + 1));
  for (int j = 0; j < ntheta_; ++j) {
    for (int m = -L_; m <= L_; ++m) {
      cplx acc = 0.0;
      for (int k = 0; k < nphi_; ++k) {
        double ph = -m * phi(k);
        acc += grid[std::size_t(j) * nphi_ + k] * cplx(std::cos(ph), std::sin(ph));
      }
      fm[std::size_t(j) * (2 * L_ + 1) + (m + L_)] = acc;
    }
  }
  std::vector<cplx> coef(ncoef(), cplx(0.0));
  const auto& tab = lam_[spin + 3];
  for (int l = std::abs(spin); l <= L_; ++l) {
    for (int m = -l; m <= l; ++m) {
      const auto& col = tab[idx(l, m)];
      cplx acc = 0.0;
      for (int j = 0; j < ntheta_; ++j)
        acc += w_[j] * col[j] * fm[std::size_t(j) * (2 * L_ + 1) + (m + L_)];
      coef[idx(l, m)] = acc;
    }
  }
  return coef;
}

std::vector<cplx> SwshEngine::synthesize(int spin, const std::vector<cplx>& coef) const {
  if (coef.size() != ncoef())
    throw std::invalid_argument("SwshEngine::synthesize: coef size mismatch");
  const auto& tab = lam_[spin + 3];
  // theta sum per m, then phi synthesis
  std::vector<cplx> fm(std::size_t(ntheta_) * (2 * L_ + 1), cplx(0.0));
  for (int l = std::abs(spin); l <= L_; ++l) {
    for (int m = -l; m <= l; ++m) {
      cplx c = coef[idx(l, m)];
      if (c == cplx(0.0)) continue;
      const auto& col = tab[idx(l, m)];
      for (int j = 0; j < ntheta_; ++j)
        fm[std::size_t(j) * (2 * L_ + 1) + (m + L_)] += c * col[j];
    }
  }
  std::vector<cplx> grid(ngrid());
  for (int j = 0; j < ntheta_; ++j) {
    for (int k = 0; k < nphi_; ++k) {
      cplx acc = 0.0;
      for (int m = -L_; m <= L_; ++m) {
        double ph = m * phi(k);
        acc += fm[std::size_t(j) * (2 * L_ + 1) + (m + L_)] *
               cplx(std::cos(ph), std::sin(ph));
      }
      grid[std::size_t(j) * nphi_ + k] = acc;
    }
  }
  return grid;
}

std::shared_ptr<const SwshEngine> get_engine(int L) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const SwshEngine>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(L);
  if (it != cache.end()) return it->second;
  auto eng = std::make_shared<const SwshEngine>(L);
  cache[L] = eng;
  return eng;
}

int thread_cap() {
  static int cap = [] {
    const char* env = std::getenv("NULLCONE_THREADS");
    int hw = int(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (env) {
      int v = std::atoi(env);
      if (v > 0) return std::min(v, hw);
    }
    return hw;
  }();
  return cap;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  int nt = std::min<std::size_t>(thread_cap(), n);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace nullcone
