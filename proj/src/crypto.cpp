#include "vanet/crypto.hpp"

#include <openssl/evp.h>

#include <stdexcept>

#include "vanet/rng.hpp"

namespace vanet::crypto {

std::size_t digest_size(DigestAlgo algo) {
  switch (algo) {
    case DigestAlgo::Md5Class: return 16;
    case DigestAlgo::Sha1Class: return 20;
    case DigestAlgo::Sha256Class: return 32;
  }
  throw std::domain_error("unknown digest algorithm");
}

std::string algo_name(DigestAlgo algo) {
  switch (algo) {
    case DigestAlgo::Md5Class: return "MD5";
    case DigestAlgo::Sha1Class: return "SHA-1";
    case DigestAlgo::Sha256Class: return "SHA-256";
  }
  throw std::domain_error("unknown digest algorithm");
}

std::optional<DigestAlgo> parse_algo(std::string_view name) {
  std::string low;
  for (char c : name) {
    if (c == '-' || c == '_') continue;
    low += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
  }
  if (low == "md5") return DigestAlgo::Md5Class;
  if (low == "sha1") return DigestAlgo::Sha1Class;
  if (low == "sha256") return DigestAlgo::Sha256Class;
  return std::nullopt;
}

KeyPair make_keypair(NodeId node, uint64_t seed) {
  KeyPair kp;
  kp.node = node;
  uint64_t a = mix_seed({seed, node.value, 0x6b65793141ULL});
  uint64_t b = mix_seed({seed, node.value, 0x6b65793242ULL});
  for (int i = 0; i < 8; ++i) {
    kp.secret[i] = static_cast<uint8_t>(a >> (8 * i));
    kp.secret[8 + i] = static_cast<uint8_t>(b >> (8 * i));
  }
  return kp;
}

static const EVP_MD* evp_for(DigestAlgo algo) {
  switch (algo) {
    case DigestAlgo::Md5Class: return EVP_md5();
    case DigestAlgo::Sha1Class: return EVP_sha1();
    case DigestAlgo::Sha256Class: return EVP_sha256();
  }
  return nullptr;
}

static std::vector<uint8_t> keyed_digest(const Key& key, std::span<const uint8_t> message,
                                         DigestAlgo algo) {
  const EVP_MD* md = evp_for(algo);
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned int out_len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("digest context allocation failed");
  bool ok = EVP_DigestInit_ex(ctx, md, nullptr) == 1 &&
            EVP_DigestUpdate(ctx, key.data(), key.size()) == 1 &&
            EVP_DigestUpdate(ctx, message.data(), message.size()) == 1 &&
            EVP_DigestFinal_ex(ctx, out, &out_len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("digest computation failed");
  std::size_t want = digest_size(algo);
  if (out_len < want) throw std::runtime_error("digest shorter than expected");
  return std::vector<uint8_t>(out, out + want);
}

Signature sign(const KeyPair& kp, std::span<const uint8_t> message, DigestAlgo algo) {
  if (message.empty()) throw std::domain_error("refusing to sign an empty message");
  return {kp.node, keyed_digest(kp.secret, message, algo)};
}

VerifyStatus verify(const Directory& dir, std::span<const uint8_t> message,
                    const Signature& sig, DigestAlgo algo) {
  const Key* key = dir.lookup(sig.signer);
  if (key == nullptr) return VerifyStatus::UnknownSigner;
  if (message.empty()) throw std::domain_error("refusing to verify an empty message");
  std::vector<uint8_t> expected = keyed_digest(*key, message, algo);
  return expected == sig.bytes ? VerifyStatus::Ok : VerifyStatus::BadSignature;
}

}  // namespace vanet::crypto
