#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "vanet/crypto.hpp"
#include "vanet/geo.hpp"
#include "vanet/packets.hpp"
#include "vanet/rng.hpp"

namespace vanet::verify {

// Chance that any one signature of an n-signature packet gets checked when the
// receiver aims at k checks per packet overall.
double verification_probability(std::size_t n, std::size_t k);

// Chance that at least two of n signers are checked when each one is checked
// independently with probability p. Zero for n < 2.
double prob_at_least_two(std::size_t n, double p);

double expected_verifications(std::size_t n, std::size_t k);  // min(n, k)

struct VerifyPolicy {
  std::size_t check_target = 10;   // average number of signatures to verify
  std::size_t min_signatures = 3;  // packets below this are never trusted
};

// Index selection for one packet: index i is picked when a uniform draw from
// [0, 100) exceeds (1 - k/n) * 100, so each index passes with probability
// min(1, k/n). If fewer than two pass, extra indices are promoted so a lone
// tampered signature cannot hide behind an empty sample.
std::vector<std::size_t> select_check_indices(std::size_t n, std::size_t k, Rng& rng);

enum class Verdict : uint8_t { Reliable, NotReliable, NotEnoughSignatures };

struct Outcome {
  Verdict verdict = Verdict::NotReliable;
  std::size_t checked = 0;  // signatures actually verified; stops at first bad
  std::optional<crypto::NodeId> first_bad;
  bool unknown_identity = false;  // first failure was an unenrolled signer
};

Outcome verify_aggregate(const crypto::Directory& dir, const packets::PacketA& a,
                         const VerifyPolicy& policy, Rng& rng);

// Exhaustive variant for receivers that are not under time pressure.
Outcome verify_every_signature(const crypto::Directory& dir, const packets::PacketA& a,
                               const VerifyPolicy& policy);

// Cell shared by all signer positions, if there is one.
std::optional<geo::CellId> common_cell(const geo::CellGrid& grid, const packets::PacketA& a);

}  // namespace vanet::verify
