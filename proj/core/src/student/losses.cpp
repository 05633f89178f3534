#include "hpc/student/losses.hpp"

namespace hpc::student {

using ad::Tensor;

ElboParts elbo_loss(const StudentNets& nets, const EncodeOut& enc, const Tensor& target,
                    double beta) {
  ElboParts parts;
  Tensor sq = ad::square(ad::sub(nets.decode(enc.z), target));  // [B, 26]
  Tensor recon_term = ad::mean(ad::sum_rows(sq));

  Tensor sigma2 = ad::square(ad::exp(enc.log_sigma));
  Tensor inner = ad::sub(ad::add(ad::square(enc.mu), sigma2),
                         ad::add_scalar(ad::mul_scalar(enc.log_sigma, 2.0), 1.0));
  Tensor kl_term = ad::mul_scalar(ad::mean(ad::sum_rows(inner)), 0.5);

  parts.loss = ad::add(recon_term, ad::mul_scalar(kl_term, beta));
  parts.recon = recon_term.item();
  parts.kl = kl_term.item();

  const int b = target.rows();
  const int d = target.cols();
  parts.recon_mse_total = parts.recon / d;
  auto sv = sq.data();
  double scan_sum = 0.0;
  const int scan0 = d - terrain::kScanPoints;
  for (int r = 0; r < b; ++r)
    for (int c = scan0; c < d; ++c) scan_sum += sv[static_cast<size_t>(r) * d + c];
  parts.recon_mse_scan = scan_sum / (static_cast<double>(b) * terrain::kScanPoints);
  return parts;
}

Tensor imitation_loss(const Tensor& student_actions, const Tensor& teacher_actions) {
  return ad::mean(ad::square(ad::sub(student_actions, teacher_actions)));
}

Tensor student_loss(const Tensor& imitation, const Tensor& elbo, double lambda) {
  return ad::add(imitation, ad::mul_scalar(elbo, lambda));
}

}  // namespace hpc::student
