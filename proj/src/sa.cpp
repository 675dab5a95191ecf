#include "semiot/sa.hpp"

#include "semiot/io.hpp"

namespace semiot {

bool default_trace_point(long n) {
  if (n <= 10000) return true;
  long step = 1;
  for (long v = n; v >= 1000; v /= 10) step *= 10;
  return n % step == 0;
}

SAResult run_sa(const TransportInstance& instance, const SAConfig& cfg, long trace_every,
                std::uint64_t seed, const std::optional<DualWeights>& g_star) {
  instance.validate();
  ContextSampler sampler(instance.sampler, derive_seed(seed, streams::contexts));
  return run_sa(instance.costs, instance.p, sampler, cfg, trace_every, g_star);
}

void write_sa_trace_csv(std::ostream& out, const SATrace& trace) {
  const Index K = trace.g.empty() ? 0 : trace.g.front().size();
  out << "n";
  for (Index k = 1; k <= K; ++k) out << ",g_" << k;
  const bool with_delta = !trace.delta_norm.empty();
  if (with_delta) out << ",delta_norm";
  out << "\r\n";
  for (std::size_t i = 0; i < trace.n.size(); ++i) {
    out << trace.n[i];
    for (Index k = 0; k < K; ++k) out << ',' << format_double(trace.g[i][k]);
    if (with_delta) out << ',' << format_double(trace.delta_norm[i]);
    out << "\r\n";
  }
}

}  // namespace semiot
