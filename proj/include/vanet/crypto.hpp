#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vanet::crypto {

// Digest families by output size; the class suffix marks that only the size
// and determinism matter here, not collision resistance.
enum class DigestAlgo : uint8_t { Md5Class = 0, Sha1Class = 1, Sha256Class = 2 };

std::size_t digest_size(DigestAlgo algo);  // 16, 20, 32
std::string algo_name(DigestAlgo algo);    // "MD5", "SHA-1", "SHA-256"
std::optional<DigestAlgo> parse_algo(std::string_view name);

struct NodeId {
  uint64_t value = 0;
  auto operator<=>(const NodeId&) const = default;
};

using Key = std::array<uint8_t, 16>;

struct KeyPair {
  NodeId node;
  Key secret{};
};

// Deterministic keys so seeded worlds are reproducible.
KeyPair make_keypair(NodeId node, uint64_t seed);

struct Signature {
  NodeId signer;
  std::vector<uint8_t> bytes;
  bool operator==(const Signature&) const = default;
};

// Identity registry: every participant is enrolled out of band, which is what
// rules out sybil and impersonation attacks in this model. Verification keys
// equal signing keys (trusted-registry MAC construction).
class Directory {
 public:
  void enroll(const KeyPair& kp) { keys_[kp.node.value] = kp.secret; }
  const Key* lookup(NodeId id) const {
    auto it = keys_.find(id.value);
    return it == keys_.end() ? nullptr : &it->second;
  }
  std::size_t size() const { return keys_.size(); }

 private:
  std::unordered_map<uint64_t, Key> keys_;
};

// Keyed digest of (secret || message), truncated to the family size.
Signature sign(const KeyPair& kp, std::span<const uint8_t> message, DigestAlgo algo);

enum class VerifyStatus : uint8_t { Ok, BadSignature, UnknownSigner };

VerifyStatus verify(const Directory& dir, std::span<const uint8_t> message,
                    const Signature& sig, DigestAlgo algo);

}  // namespace vanet::crypto
