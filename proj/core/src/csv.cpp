#include "pcqp/csv.hpp"

#include <ostream>

#include <fmt/core.h>

namespace pcqp {

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

std::string trace_csv_header() {
  return "k,mu,alpha,dmu_p,mu_hat,dmu_c,mu_next,proximity_before,proximity_hat,proximity_next,"
         "pred_dv_dot_ds,pred_curvature,pred_product_norm,pred_product_bound,"
         "corr_dv_dot_ds,corr_curvature,corr_product_norm,corr_product_bound,"
         "slack_predictor_gain,slack_predictor_decrease,slack_corrector_gain,slack_contraction";
}

void write_trace_csv(std::ostream& out, std::span<const IterationRecord> trace, const std::string& prefix,
                     const std::string& prefix_header, bool header) {
  if (header) out << prefix_header << trace_csv_header() << '\n';
  for (const IterationRecord& r : trace) {
    out << prefix << r.k;
    for (double x : {r.mu, r.alpha, r.dmu_p, r.mu_hat, r.dmu_c, r.mu_next, r.proximity_before, r.proximity_hat,
                     r.proximity_next, r.predictor.dv_dot_ds, r.predictor.curvature, r.predictor.product_norm,
                     r.predictor.product_bound, r.corrector.dv_dot_ds, r.corrector.curvature,
                     r.corrector.product_norm, r.corrector.product_bound, r.slacks.predictor_gain,
                     r.slacks.predictor_decrease, r.slacks.corrector_gain, r.slacks.contraction}) {
      out << ',' << format_real(x);
    }
    out << '\n';
  }
}

}  // namespace pcqp
