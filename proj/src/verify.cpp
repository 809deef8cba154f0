#include "vanet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vanet::verify {

double verification_probability(std::size_t n, std::size_t k) {
  if (n < 1) throw std::domain_error("verification probability needs n >= 1");
  return std::min(1.0, static_cast<double>(k) / static_cast<double>(n));
}

double prob_at_least_two(std::size_t n, double p) {
  if (p < 0.0 || p > 1.0) throw std::domain_error("probability outside [0, 1]");
  if (n < 2) return 0.0;
  double q = 1.0 - p;
  double nn = static_cast<double>(n);
  return 1.0 - std::pow(q, nn) - nn * p * std::pow(q, nn - 1.0);
}

double expected_verifications(std::size_t n, std::size_t k) {
  return static_cast<double>(std::min(n, k));
}

std::vector<std::size_t> select_check_indices(std::size_t n, std::size_t k, Rng& rng) {
  if (n < 1) throw std::domain_error("cannot sample from an empty signer list");
  double threshold = (1.0 - static_cast<double>(k) / static_cast<double>(n)) * 100.0;
  std::vector<std::size_t> picked;
  picked.reserve(std::min(n, k + 4));
  for (std::size_t i = 0; i < n; ++i)
    if (rng.uniform(0.0, 100.0) > threshold) picked.push_back(i);

  std::size_t floor_count = std::min<std::size_t>(n, 2);
  if (picked.size() < floor_count) {
    std::vector<std::size_t> rest;
    rest.reserve(n - picked.size());
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (next < picked.size() && picked[next] == i) {
        ++next;
        continue;
      }
      rest.push_back(i);
    }
    for (std::size_t idx : rng.sample_indices(rest.size(), floor_count - picked.size()))
      picked.push_back(rest[idx]);
    std::sort(picked.begin(), picked.end());
  }
  return picked;
}

namespace {

Outcome check_indices(const crypto::Directory& dir, const packets::PacketA& a,
                      const std::vector<std::size_t>& indices) {
  auto message = packets::encode_report(a.report);
  Outcome out;
  for (std::size_t i : indices) {
    const packets::SignerRecord& rec = a.signers[i];
    ++out.checked;
    auto status = crypto::verify(dir, message, {rec.id, rec.sig}, a.algo);
    if (status != crypto::VerifyStatus::Ok) {
      out.verdict = Verdict::NotReliable;
      out.first_bad = rec.id;
      out.unknown_identity = status == crypto::VerifyStatus::UnknownSigner;
      return out;
    }
  }
  out.verdict = Verdict::Reliable;
  return out;
}

}  // namespace

Outcome verify_aggregate(const crypto::Directory& dir, const packets::PacketA& a,
                         const VerifyPolicy& policy, Rng& rng) {
  if (a.signers.size() < policy.min_signatures)
    return {Verdict::NotEnoughSignatures, 0, std::nullopt, false};
  return check_indices(dir, a, select_check_indices(a.signers.size(), policy.check_target, rng));
}

Outcome verify_every_signature(const crypto::Directory& dir, const packets::PacketA& a,
                               const VerifyPolicy& policy) {
  if (a.signers.size() < policy.min_signatures)
    return {Verdict::NotEnoughSignatures, 0, std::nullopt, false};
  std::vector<std::size_t> all(a.signers.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return check_indices(dir, a, all);
}

std::optional<geo::CellId> common_cell(const geo::CellGrid& grid, const packets::PacketA& a) {
  if (a.signers.empty()) return std::nullopt;
  geo::CellId first = geo::cell_of(grid, a.signers.front().pos.to_position());
  for (const packets::SignerRecord& rec : a.signers)
    if (geo::cell_of(grid, rec.pos.to_position()) != first) return std::nullopt;
  return first;
}

}  // namespace vanet::verify
