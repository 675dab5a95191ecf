#include "semiot/trace.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include "semiot/io.hpp"

namespace semiot {

std::uint64_t context_hash(const Eigen::Ref<const Eigen::VectorXd>& x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Index i = 0; i < x.size(); ++i) {
    const double v = x[i];
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (std::size_t b = 0; b < sizeof(double); ++b) {
      h ^= bytes[b];
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

void write_run_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "n,x_hash,pi,pi_hat,explored,correct,delta_norm,Delta_max\r\n";
  char hash[17];
  for (const auto& r : trace.rows) {
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(r.x_hash));
    out << r.n << ',' << hash << ',' << r.pi + 1 << ',' << r.pi_hat + 1 << ',' << (r.explored ? 1 : 0)
        << ',';
    if (r.correct >= 0) out << r.correct;
    out << ',';
    if (!std::isnan(r.delta_norm)) out << format_double(r.delta_norm);
    out << ',';
    if (!std::isnan(r.Delta_max)) out << format_double(r.Delta_max);
    out << "\r\n";
  }
}

}  // namespace semiot
