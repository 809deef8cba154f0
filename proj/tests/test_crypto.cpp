#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "vanet/crypto.hpp"

using namespace vanet::crypto;

static std::vector<uint8_t> msg(const char* text) {
  return std::vector<uint8_t>(text, text + std::char_traits<char>::length(text));
}

TEST_CASE("digest sizes per family") {
  CHECK(digest_size(DigestAlgo::Md5Class) == 16);
  CHECK(digest_size(DigestAlgo::Sha1Class) == 20);
  CHECK(digest_size(DigestAlgo::Sha256Class) == 32);
}

TEST_CASE("algo names and parsing") {
  CHECK(algo_name(DigestAlgo::Md5Class) == "MD5");
  CHECK(algo_name(DigestAlgo::Sha1Class) == "SHA-1");
  CHECK(algo_name(DigestAlgo::Sha256Class) == "SHA-256");
  CHECK(parse_algo("md5") == DigestAlgo::Md5Class);
  CHECK(parse_algo("SHA-1") == DigestAlgo::Sha1Class);
  CHECK(parse_algo("sha_256") == DigestAlgo::Sha256Class);
  CHECK(parse_algo("Sha256") == DigestAlgo::Sha256Class);
  CHECK_FALSE(parse_algo("sha512").has_value());
}

TEST_CASE("deterministic keys from node id and seed") {
  KeyPair a = make_keypair({7}, 1234);
  KeyPair b = make_keypair({7}, 1234);
  KeyPair c = make_keypair({8}, 1234);
  KeyPair d = make_keypair({7}, 1235);
  CHECK(a.secret == b.secret);
  CHECK(a.secret != c.secret);
  CHECK(a.secret != d.secret);
}

TEST_CASE("sign is deterministic and key dependent") {
  auto m = msg("icy road ahead");
  KeyPair k1 = make_keypair({1}, 99);
  KeyPair k2 = make_keypair({2}, 99);
  for (DigestAlgo algo :
       {DigestAlgo::Md5Class, DigestAlgo::Sha1Class, DigestAlgo::Sha256Class}) {
    Signature s1 = sign(k1, m, algo);
    Signature s2 = sign(k1, m, algo);
    Signature s3 = sign(k2, m, algo);
    CHECK(s1.bytes.size() == digest_size(algo));
    CHECK(s1.bytes == s2.bytes);
    CHECK(s1.bytes != s3.bytes);
    CHECK(s1.signer == NodeId{1});
  }
}

TEST_CASE("different messages give different signatures") {
  KeyPair k = make_keypair({3}, 5);
  auto m1 = msg("jam at km 12");
  auto m2 = msg("jam at km 13");
  CHECK(sign(k, m1, DigestAlgo::Sha1Class).bytes != sign(k, m2, DigestAlgo::Sha1Class).bytes);

  // single flipped bit
  auto m3 = m1;
  m3[0] ^= 0x01;
  CHECK(sign(k, m1, DigestAlgo::Md5Class).bytes != sign(k, m3, DigestAlgo::Md5Class).bytes);
}

TEST_CASE("verify round trip against the directory") {
  Directory dir;
  KeyPair k = make_keypair({42}, 7);
  dir.enroll(k);
  auto m = msg("obstacle on lane 2");

  Signature good = sign(k, m, DigestAlgo::Sha256Class);
  CHECK(verify(dir, m, good, DigestAlgo::Sha256Class) == VerifyStatus::Ok);

  SUBCASE("tampered message fails") {
    auto tampered = m;
    tampered[3] ^= 0x80;
    CHECK(verify(dir, tampered, good, DigestAlgo::Sha256Class) == VerifyStatus::BadSignature);
  }
  SUBCASE("tampered signature bytes fail") {
    Signature bad = good;
    bad.bytes[0] ^= 0x01;
    CHECK(verify(dir, m, bad, DigestAlgo::Sha256Class) == VerifyStatus::BadSignature);
  }
  SUBCASE("unknown signer is distinguishable from a bad signature") {
    Signature foreign = good;
    foreign.signer = NodeId{4242};
    CHECK(verify(dir, m, foreign, DigestAlgo::Sha256Class) == VerifyStatus::UnknownSigner);
  }
  SUBCASE("signature claiming another enrolled node fails verification") {
    KeyPair other = make_keypair({43}, 7);
    dir.enroll(other);
    Signature forged = good;
    forged.signer = NodeId{43};
    CHECK(verify(dir, m, forged, DigestAlgo::Sha256Class) == VerifyStatus::BadSignature);
  }
}

TEST_CASE("empty messages are rejected") {
  Directory dir;
  KeyPair k = make_keypair({1}, 1);
  dir.enroll(k);
  std::vector<uint8_t> empty;
  CHECK_THROWS_AS((void)sign(k, empty, DigestAlgo::Md5Class), std::domain_error);
  Signature s{NodeId{1}, std::vector<uint8_t>(16, 0)};
  CHECK_THROWS_AS((void)verify(dir, empty, s, DigestAlgo::Md5Class), std::domain_error);
}

TEST_CASE("directory enrollment is last-write-wins and size-tracked") {
  Directory dir;
  CHECK(dir.size() == 0);
  dir.enroll(make_keypair({1}, 1));
  dir.enroll(make_keypair({2}, 1));
  CHECK(dir.size() == 2);
  CHECK(dir.lookup(NodeId{1}) != nullptr);
  CHECK(dir.lookup(NodeId{9}) == nullptr);

  KeyPair replacement = make_keypair({1}, 999);
  dir.enroll(replacement);
  CHECK(dir.size() == 2);
  CHECK(*dir.lookup(NodeId{1}) == replacement.secret);
}
