#include "vanet/packets.hpp"

#include <cmath>
#include <cstring>
#include <limits>

namespace vanet::packets {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Big-endian append/read helpers.

void put_u8(std::vector<uint8_t>& out, uint8_t v) { out.push_back(v); }

template <typename T>
void put_be(std::vector<uint8_t>& out, T value) {
  using U = std::make_unsigned_t<T>;
  U u = static_cast<U>(value);
  for (int shift = static_cast<int>(sizeof(T)) * 8 - 8; shift >= 0; shift -= 8)
    out.push_back(static_cast<uint8_t>(u >> shift));
}

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) {
    if (remaining() < n) throw DecodeError(std::string("truncated input reading ") + what, pos_);
  }

  uint8_t u8(const char* what) {
    need(1, what);
    return bytes_[pos_++];
  }

  template <typename T>
  T be(const char* what) {
    need(sizeof(T), what);
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u = static_cast<U>(u << 8) | bytes_[pos_ + i];
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }

  std::vector<uint8_t> take(std::size_t n, const char* what) {
    need(n, what);
    std::vector<uint8_t> out(bytes_.begin() + static_cast<long>(pos_),
                             bytes_.begin() + static_cast<long>(pos_ + n));
    pos_ += n;
    return out;
  }

  void expect_end() {
    if (remaining() != 0) throw DecodeError("trailing bytes after packet", pos_);
  }

 private:
  std::span<const uint8_t> bytes_;
  std::size_t pos_ = 0;
};

DigestAlgo decode_algo(Reader& rd) {
  std::size_t at = rd.pos();
  uint8_t code = rd.u8("digest algorithm");
  if (code > 2) throw DecodeError("unknown digest algorithm code", at);
  return static_cast<DigestAlgo>(code);
}

void encode_fixed(std::vector<uint8_t>& out, const FixedPos& p) {
  put_be<int64_t>(out, p.x_mm);
  put_be<int64_t>(out, p.y_mm);
  put_be<int64_t>(out, p.z_mm);
}

FixedPos decode_fixed(Reader& rd, const char* what) {
  FixedPos p;
  p.x_mm = rd.be<int64_t>(what);
  p.y_mm = rd.be<int64_t>(what);
  p.z_mm = rd.be<int64_t>(what);
  return p;
}

void encode_report_into(std::vector<uint8_t>& out, const EventReport& r) {
  std::size_t start = out.size();
  encode_fixed(out, r.pos);
  put_u8(out, r.event_type);
  put_u8(out, r.direction);
  put_be<uint32_t>(out, r.road_id);
  put_u8(out, r.road_class);
  put_be<uint16_t>(out, r.speed_limit_kmh);
  put_u8(out, r.lanes);
  put_be<int64_t>(out, r.timestamp_ms);
  put_be<uint64_t>(out, r.source.value);
  put_be<uint32_t>(out, r.danger_radius_m);
  put_be<uint32_t>(out, r.uncertainty_radius_m);
  put_be<uint32_t>(out, r.security_radius_m);
  out.resize(start + kReportSize, 0);  // zero padding to the fixed size
}

EventReport decode_report_from(Reader& rd) {
  std::size_t start = rd.pos();
  EventReport r;
  r.pos = decode_fixed(rd, "report coordinates");
  r.event_type = rd.u8("event type");
  r.direction = rd.u8("direction");
  r.road_id = rd.be<uint32_t>("road id");
  r.road_class = rd.u8("road class");
  r.speed_limit_kmh = rd.be<uint16_t>("speed limit");
  r.lanes = rd.u8("lane count");
  r.timestamp_ms = rd.be<int64_t>("timestamp");
  r.source.value = rd.be<uint64_t>("source id");
  r.danger_radius_m = rd.be<uint32_t>("danger radius");
  r.uncertainty_radius_m = rd.be<uint32_t>("uncertainty radius");
  r.security_radius_m = rd.be<uint32_t>("security radius");
  std::size_t used = rd.pos() - start;
  (void)rd.take(kReportSize - used, "report padding");  // content ignored
  return r;
}

}  // namespace

FixedPos FixedPos::from_position(const geo::Position& p) {
  return {static_cast<int64_t>(std::llround(p.x * 1000.0)),
          static_cast<int64_t>(std::llround(p.y * 1000.0)),
          static_cast<int64_t>(std::llround(p.z * 1000.0))};
}

SignerPos SignerPos::from_position(const geo::Position& p) {
  auto narrow = [](double meters) {
    double mm = std::round(meters * 1000.0);
    if (mm < std::numeric_limits<int32_t>::min() || mm > std::numeric_limits<int32_t>::max())
      throw std::domain_error("signer position exceeds the wire range");
    return static_cast<int32_t>(mm);
  };
  return {narrow(p.x), narrow(p.y), narrow(p.z)};
}

std::vector<uint8_t> encode_report(const EventReport& r) {
  std::vector<uint8_t> out;
  out.reserve(kReportSize);
  encode_report_into(out, r);
  return out;
}

EventReport decode_report(std::span<const uint8_t> bytes) {
  Reader rd(bytes);
  EventReport r = decode_report_from(rd);
  rd.expect_end();
  return r;
}

uint8_t type_tag(const Packet& p) {
  switch (p.index()) {
    case 0: return kTagW;
    case 1: return kTagR;
    case 2: return kTagS;
    case 3: return kTagA;
  }
  throw std::logic_error("empty packet variant");
}

std::vector<uint8_t> encode(const Packet& p) {
  std::vector<uint8_t> out;
  if (const auto* w = std::get_if<PacketW>(&p)) {
    out.reserve(1 + kReportSize + 8 + 1 + w->sig.size());
    put_u8(out, kTagW);
    encode_report_into(out, w->report);
    put_be<uint64_t>(out, w->sender.value);
    put_u8(out, static_cast<uint8_t>(w->algo));
    out.insert(out.end(), w->sig.begin(), w->sig.end());
  } else if (const auto* r = std::get_if<PacketR>(&p)) {
    put_u8(out, kTagR);
    encode_report_into(out, r->report);
    put_be<uint64_t>(out, r->leader.value);
    encode_fixed(out, r->leader_pos);
    put_be<int64_t>(out, r->request_timestamp_ms);
    put_u8(out, static_cast<uint8_t>(r->algo));
    out.insert(out.end(), r->sig.begin(), r->sig.end());
  } else if (const auto* s = std::get_if<PacketS>(&p)) {
    put_u8(out, kTagS);
    encode_report_into(out, s->report);
    put_be<uint64_t>(out, s->member.value);
    encode_fixed(out, s->member_pos);
    put_be<int64_t>(out, s->member_timestamp_ms);
    put_u8(out, static_cast<uint8_t>(s->algo));
    out.insert(out.end(), s->sig.begin(), s->sig.end());
  } else {
    const auto& a = std::get<PacketA>(p);
    if (a.signers.size() > 0xffff) throw std::domain_error("too many signers to encode");
    std::size_t ds = crypto::digest_size(a.algo);
    out.reserve(1 + kReportSize + 8 + 1 + 2 + a.signers.size() * (kSignerRecordOverhead + ds));
    put_u8(out, kTagA);
    encode_report_into(out, a.report);
    put_be<uint64_t>(out, a.leader.value);
    put_u8(out, static_cast<uint8_t>(a.algo));
    put_be<uint16_t>(out, static_cast<uint16_t>(a.signers.size()));
    for (const SignerRecord& rec : a.signers) {
      if (rec.sig.size() != ds) throw std::domain_error("signer digest size mismatch");
      put_be<uint64_t>(out, rec.id.value);
      put_be<int32_t>(out, rec.pos.x_mm);
      put_be<int32_t>(out, rec.pos.y_mm);
      put_be<int32_t>(out, rec.pos.z_mm);
      out.insert(out.end(), rec.sig.begin(), rec.sig.end());
    }
  }
  return out;
}

Packet decode(std::span<const uint8_t> bytes) {
  Reader rd(bytes);
  std::size_t tag_at = rd.pos();
  uint8_t tag = rd.u8("type tag");
  switch (tag) {
    case kTagW: {
      PacketW w;
      w.report = decode_report_from(rd);
      w.sender.value = rd.be<uint64_t>("sender id");
      w.algo = decode_algo(rd);
      w.sig = rd.take(crypto::digest_size(w.algo), "signature");
      rd.expect_end();
      return w;
    }
    case kTagR: {
      PacketR r;
      r.report = decode_report_from(rd);
      r.leader.value = rd.be<uint64_t>("leader id");
      r.leader_pos = decode_fixed(rd, "leader position");
      r.request_timestamp_ms = rd.be<int64_t>("request timestamp");
      r.algo = decode_algo(rd);
      r.sig = rd.take(crypto::digest_size(r.algo), "signature");
      rd.expect_end();
      return r;
    }
    case kTagS: {
      PacketS s;
      s.report = decode_report_from(rd);
      s.member.value = rd.be<uint64_t>("member id");
      s.member_pos = decode_fixed(rd, "member position");
      s.member_timestamp_ms = rd.be<int64_t>("member timestamp");
      s.algo = decode_algo(rd);
      s.sig = rd.take(crypto::digest_size(s.algo), "signature");
      rd.expect_end();
      return s;
    }
    case kTagA: {
      PacketA a;
      a.report = decode_report_from(rd);
      a.leader.value = rd.be<uint64_t>("leader id");
      a.algo = decode_algo(rd);
      std::size_t count_at = rd.pos();
      uint16_t n = rd.be<uint16_t>("signer count");
      std::size_t ds = crypto::digest_size(a.algo);
      std::size_t need = static_cast<std::size_t>(n) * (kSignerRecordOverhead + ds);
      if (rd.remaining() < need)
        throw DecodeError("signer count overflows the packet", count_at);
      a.signers.reserve(n);
      for (uint16_t i = 0; i < n; ++i) {
        SignerRecord rec;
        rec.id.value = rd.be<uint64_t>("signer id");
        rec.pos.x_mm = rd.be<int32_t>("signer position");
        rec.pos.y_mm = rd.be<int32_t>("signer position");
        rec.pos.z_mm = rd.be<int32_t>("signer position");
        rec.sig = rd.take(ds, "signer digest");
        a.signers.push_back(std::move(rec));
      }
      rd.expect_end();
      return a;
    }
    default:
      throw DecodeError("unknown packet type tag", tag_at);
  }
}

PacketBudget::PacketBudget(int packet_size) : packet_size_(packet_size) {
  if (packet_size != 256 && packet_size != 512 && packet_size != 1024 && packet_size != 1500)
    throw std::domain_error("packet size must be one of 256, 512, 1024, 1500");
}

int max_signatures(const PacketBudget& budget, DigestAlgo algo) {
  return budget.signature_area() / static_cast<int>(crypto::digest_size(algo));
}

int max_signers_practical(const PacketBudget& budget, DigestAlgo algo) {
  return budget.signature_area() /
         (kSignerRecordOverhead + static_cast<int>(crypto::digest_size(algo)));
}

std::vector<SizingRow> sizing_table() {
  std::vector<SizingRow> rows;
  for (int size : {256, 512, 1024, 1500}) {
    PacketBudget budget(size);
    for (DigestAlgo algo :
         {DigestAlgo::Md5Class, DigestAlgo::Sha1Class, DigestAlgo::Sha256Class}) {
      rows.push_back({algo, size, budget.signature_area(), max_signatures(budget, algo)});
    }
  }
  return rows;
}

std::string to_hex(std::span<const uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    out += digits[b >> 4];
    out += digits[b & 0x0f];
  }
  return out;
}

std::vector<uint8_t> from_hex(std::string_view text) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (text.size() % 2 != 0) throw std::invalid_argument("hex text has odd length");
  std::vector<uint8_t> out;
  out.reserve(text.size() / 2);
  for (std::size_t i = 0; i < text.size(); i += 2) {
    int hi = nibble(text[i]);
    int lo = nibble(text[i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
    out.push_back(static_cast<uint8_t>(hi << 4 | lo));
  }
  return out;
}

geo::RoadProfile road_profile(const EventReport& r) {
  geo::RoadProfile road;
  road.lanes = r.lanes;
  road.speed_limit_kmh = r.speed_limit_kmh;
  road.road_class = static_cast<geo::RoadClass>(r.road_class);
  // The report carries no heading field; the direction code orients the grid
  // so every receiver rebuilds the same partition.
  road.heading_rad = r.direction == 0 ? 0.0 : kPi;
  return road;
}

geo::ZoneRadii zone_radii(const EventReport& r) {
  return {static_cast<double>(r.danger_radius_m), static_cast<double>(r.uncertainty_radius_m),
          static_cast<double>(r.security_radius_m)};
}

geo::CellGrid grid_for(const EventReport& r) {
  return geo::build_grid(r.pos.to_position(), road_profile(r),
                         static_cast<double>(r.danger_radius_m));
}

}  // namespace vanet::packets
