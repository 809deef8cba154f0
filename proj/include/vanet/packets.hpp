#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vanet/crypto.hpp"
#include "vanet/geo.hpp"

namespace vanet::packets {

using crypto::DigestAlgo;
using crypto::NodeId;

// Wire type tags.
inline constexpr uint8_t kTagW = 0x01;  // initial warning
inline constexpr uint8_t kTagR = 0x02;  // group formation request
inline constexpr uint8_t kTagS = 0x03;  // member agreement (signature)
inline constexpr uint8_t kTagA = 0x04;  // aggregated warning

// Event type codes.
inline constexpr uint8_t kTrafficJam = 1;
inline constexpr uint8_t kFreeParking = 2;
inline constexpr uint8_t kAccident = 3;
inline constexpr uint8_t kObstacle = 4;

// Millimeter fixed point: signed 64-bit, three decimal digits of fraction.
struct FixedPos {
  int64_t x_mm = 0;
  int64_t y_mm = 0;
  int64_t z_mm = 0;
  auto operator<=>(const FixedPos&) const = default;
  geo::Position to_position() const {
    return {static_cast<double>(x_mm) / 1000.0, static_cast<double>(y_mm) / 1000.0,
            static_cast<double>(z_mm) / 1000.0};
  }
  static FixedPos from_position(const geo::Position& p);
};

// Fixed 100-byte payload shared by every packet type. 62 bytes of fields,
// 38 bytes of zero padding.
struct EventReport {
  FixedPos pos;
  uint8_t event_type = kTrafficJam;
  uint8_t direction = 0;  // affected carriageway: 0 or 1
  uint32_t road_id = 0;
  uint8_t road_class = 0;  // geo::RoadClass underlying value
  uint16_t speed_limit_kmh = 0;
  uint8_t lanes = 1;
  int64_t timestamp_ms = 0;  // when the event came into being
  NodeId source;
  uint32_t danger_radius_m = 0;
  uint32_t uncertainty_radius_m = 0;
  uint32_t security_radius_m = 0;
  bool operator==(const EventReport&) const = default;
};

inline constexpr std::size_t kReportSize = 100;

// Canonical encoding; signatures are always computed over these 100 bytes.
std::vector<uint8_t> encode_report(const EventReport& r);
EventReport decode_report(std::span<const uint8_t> bytes);

struct PacketW {
  EventReport report;
  NodeId sender;
  DigestAlgo algo = DigestAlgo::Sha1Class;
  std::vector<uint8_t> sig;  // sender's signature over the encoded report
  bool operator==(const PacketW&) const = default;
};

struct PacketR {
  EventReport report;
  NodeId leader;
  FixedPos leader_pos;  // must lie inside the cell the request targets
  int64_t request_timestamp_ms = 0;
  DigestAlgo algo = DigestAlgo::Sha1Class;
  std::vector<uint8_t> sig;
  bool operator==(const PacketR&) const = default;
};

struct PacketS {
  EventReport report;
  NodeId member;
  FixedPos member_pos;
  int64_t member_timestamp_ms = 0;
  DigestAlgo algo = DigestAlgo::Sha1Class;
  std::vector<uint8_t> sig;
  bool operator==(const PacketS&) const = default;
};

// Signer positions ride in 12 bytes (3 x signed 32-bit millimeters), which
// together with the 8-byte id gives the 20-byte per-signer record overhead.
struct SignerPos {
  int32_t x_mm = 0;
  int32_t y_mm = 0;
  int32_t z_mm = 0;
  auto operator<=>(const SignerPos&) const = default;
  geo::Position to_position() const {
    return {static_cast<double>(x_mm) / 1000.0, static_cast<double>(y_mm) / 1000.0,
            static_cast<double>(z_mm) / 1000.0};
  }
  static SignerPos from_position(const geo::Position& p);  // throws on overflow
};

struct SignerRecord {
  NodeId id;
  SignerPos pos;
  std::vector<uint8_t> sig;
  bool operator==(const SignerRecord&) const = default;
};

struct PacketA {
  EventReport report;
  NodeId leader;  // equals signers.front().id for well-formed packets
  DigestAlgo algo = DigestAlgo::Sha1Class;
  std::vector<SignerRecord> signers;
  bool operator==(const PacketA&) const = default;
};

using Packet = std::variant<PacketW, PacketR, PacketS, PacketA>;

uint8_t type_tag(const Packet& p);

class DecodeError : public std::runtime_error {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

std::vector<uint8_t> encode(const Packet& p);
Packet decode(std::span<const uint8_t> bytes);

// MTU classes under study; 100 bytes always go to the message, the rest is
// the signature area.
struct PacketBudget {
  explicit PacketBudget(int packet_size);
  int packet_size() const { return packet_size_; }
  int signature_area() const { return packet_size_ - static_cast<int>(kReportSize); }

 private:
  int packet_size_;
};

inline constexpr int kSignerRecordOverhead = 20;  // 8-byte id + 12-byte position

// Digest-only capacity: how many bare digests fit in the signature area.
int max_signatures(const PacketBudget& budget, DigestAlgo algo);

// Capacity when each signature carries its signer record.
int max_signers_practical(const PacketBudget& budget, DigestAlgo algo);

struct SizingRow {
  DigestAlgo algo;
  int packet_size;
  int signature_area;
  int max_signatures;
};
// All digest/packet-size combinations, grouped by packet size.
std::vector<SizingRow> sizing_table();

std::string to_hex(std::span<const uint8_t> bytes);
std::vector<uint8_t> from_hex(std::string_view text);

// Bridges from a report to the geometry every receiver must rebuild
// identically. The grid heading is derived from the direction code.
geo::RoadProfile road_profile(const EventReport& r);
geo::ZoneRadii zone_radii(const EventReport& r);
geo::CellGrid grid_for(const EventReport& r);

}  // namespace vanet::packets
