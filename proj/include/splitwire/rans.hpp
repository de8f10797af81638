#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "splitwire/wire.hpp"

namespace splitwire {

// Entropy-coded symbol stream: static frequency table normalized to a
// power-of-two total, byte-renormalized 32-bit rANS payload.
struct RansStream {
  uint8_t symbol_bits = 0;
  uint8_t table_log = 12;
  uint32_t symbol_count = 0;
  std::vector<uint16_t> freq;  // 1 << symbol_bits entries, sums to 1 << table_log
  std::vector<uint8_t> payload;

  // u8 symbol_bits, u8 table_log, u32 symbol_count, u16 freq table,
  // u32 payload_len, payload.
  size_t wire_size_bytes() const { return 1 + 1 + 4 + 2 * freq.size() + 4 + payload.size(); }
};

// Two-pass static-model encode. Deterministic; lossless. table_log defaults
// to 12 and is raised only when the stream holds more distinct symbols than
// the table can seat.
RansStream rans_encode(std::span<const uint32_t> symbols, uint32_t symbol_bits);

// Exact inverse of rans_encode. Desynchronization (truncation, tampering) is
// detected via the final-state and bytes-consumed checks.
std::vector<uint32_t> rans_decode(const RansStream& stream);

void rans_write(wire::Writer& w, const RansStream& stream);
RansStream rans_read(wire::Reader& r);

}  // namespace splitwire
