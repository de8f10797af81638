#include "splitwire/rans.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace splitwire {

namespace {

constexpr uint32_t kStateLower = 1u << 23;  // renormalization lower bound
constexpr uint32_t kDefaultTableLog = 12;
constexpr uint32_t kMaxTableLog = 15;
constexpr uint32_t kMaxSymbolBits = 15;

// Proportional frequencies normalized to sum exactly 2^table_log, every
// occurring symbol keeping freq >= 1. Adjustment order is deterministic:
// symbols sorted by count descending, index ascending.
std::vector<uint16_t> normalize_freqs(const std::vector<uint64_t>& counts, uint64_t total,
                                      uint32_t table_log) {
  const uint32_t target = 1u << table_log;
  std::vector<uint16_t> freq(counts.size(), 0);
  std::vector<uint32_t> occupied;
  for (uint32_t s = 0; s < counts.size(); ++s) {
    if (counts[s] > 0) occupied.push_back(s);
  }
  if (occupied.size() > target) throw std::invalid_argument("rans: alphabet too large for table");

  uint64_t sum = 0;
  for (uint32_t s : occupied) {
    uint64_t f = (counts[s] * target + total / 2) / total;
    f = std::clamp<uint64_t>(f, 1, target);
    freq[s] = static_cast<uint16_t>(f);
    sum += f;
  }

  std::sort(occupied.begin(), occupied.end(), [&](uint32_t a, uint32_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return a < b;
  });
  while (sum > target) {
    for (uint32_t s : occupied) {
      if (sum == target) break;
      if (freq[s] > 1) {
        uint64_t dec = std::min<uint64_t>(freq[s] - 1, sum - target);
        freq[s] = static_cast<uint16_t>(freq[s] - dec);
        sum -= dec;
      }
    }
  }
  if (sum < target) freq[occupied.front()] = static_cast<uint16_t>(freq[occupied.front()] + (target - sum));
  return freq;
}

struct SymbolTable {
  std::vector<uint32_t> cum;  // cumulative frequencies, size alphabet+1
  std::vector<uint16_t> slot_to_sym;

  SymbolTable(const std::vector<uint16_t>& freq, uint32_t table_log) {
    cum.resize(freq.size() + 1, 0);
    for (size_t s = 0; s < freq.size(); ++s) cum[s + 1] = cum[s] + freq[s];
    if (cum.back() != (1u << table_log)) throw std::runtime_error("rans: frequency table does not sum to 2^table_log");
    slot_to_sym.resize(1u << table_log);
    for (size_t s = 0; s < freq.size(); ++s) {
      for (uint32_t k = cum[s]; k < cum[s + 1]; ++k) slot_to_sym[k] = static_cast<uint16_t>(s);
    }
  }
};

}  // namespace

RansStream rans_encode(std::span<const uint32_t> symbols, uint32_t symbol_bits) {
  if (symbol_bits < 1 || symbol_bits > kMaxSymbolBits)
    throw std::invalid_argument("rans: symbol_bits must be in [1,15]");

  const uint32_t alphabet = 1u << symbol_bits;
  std::vector<uint64_t> counts(alphabet, 0);
  for (uint32_t s : symbols) {
    if (s >= alphabet) throw std::invalid_argument("rans: symbol out of alphabet");
    ++counts[s];
  }

  RansStream stream;
  stream.symbol_bits = static_cast<uint8_t>(symbol_bits);
  stream.symbol_count = static_cast<uint32_t>(symbols.size());
  stream.freq.assign(alphabet, 0);
  if (symbols.empty()) {
    stream.table_log = static_cast<uint8_t>(kDefaultTableLog);
    return stream;
  }

  uint32_t distinct = 0;
  for (uint64_t c : counts) distinct += (c > 0);
  uint32_t table_log = kDefaultTableLog;
  while ((1u << table_log) < distinct && table_log < kMaxTableLog) ++table_log;
  stream.table_log = static_cast<uint8_t>(table_log);
  stream.freq = normalize_freqs(counts, symbols.size(), table_log);

  std::vector<uint32_t> cum(alphabet + 1, 0);
  for (uint32_t s = 0; s < alphabet; ++s) cum[s + 1] = cum[s] + stream.freq[s];

  // Symbols are encoded in reverse so the decoder emits them forward; the
  // byte buffer is reversed once at the end (rANS renorm bytes are LIFO).
  std::vector<uint8_t> buf;
  buf.reserve(symbols.size());
  uint32_t x = kStateLower;
  for (size_t i = symbols.size(); i-- > 0;) {
    uint32_t s = symbols[i];
    uint32_t f = stream.freq[s];
    uint32_t x_max = ((kStateLower >> table_log) << 8) * f;
    while (x >= x_max) {
      buf.push_back(static_cast<uint8_t>(x));
      x >>= 8;
    }
    x = ((x / f) << table_log) + (x % f) + cum[s];
  }
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<uint8_t>(x >> (8 * i)));
  std::reverse(buf.begin(), buf.end());
  stream.payload = std::move(buf);
  return stream;
}

std::vector<uint32_t> rans_decode(const RansStream& stream) {
  if (stream.symbol_bits < 1 || stream.symbol_bits > kMaxSymbolBits)
    throw std::runtime_error("rans: bad symbol_bits");
  if (stream.table_log < 1 || stream.table_log > kMaxTableLog)
    throw std::runtime_error("rans: bad table_log");
  if (stream.freq.size() != (size_t(1) << stream.symbol_bits))
    throw std::runtime_error("rans: frequency table size mismatch");

  if (stream.symbol_count == 0) {
    if (!stream.payload.empty()) throw std::runtime_error("rans: trailing bytes in empty stream");
    return {};
  }

  const uint32_t table_log = stream.table_log;
  const uint32_t mask = (1u << table_log) - 1;
  SymbolTable table(stream.freq, table_log);

  const auto& bytes = stream.payload;
  if (bytes.size() < 4) throw std::runtime_error("rans: payload truncated");
  size_t pos = 0;
  uint32_t x = 0;
  for (int i = 0; i < 4; ++i) x = (x << 8) | bytes[pos++];

  std::vector<uint32_t> out(stream.symbol_count);
  for (uint32_t i = 0; i < stream.symbol_count; ++i) {
    uint32_t slot = x & mask;
    uint32_t s = table.slot_to_sym[slot];
    x = stream.freq[s] * (x >> table_log) + slot - table.cum[s];
    while (x < kStateLower) {
      if (pos == bytes.size()) throw std::runtime_error("rans: payload truncated");
      x = (x << 8) | bytes[pos++];
    }
    out[i] = s;
  }
  if (x != kStateLower) throw std::runtime_error("rans: state desynchronized (corrupt payload)");
  if (pos != bytes.size()) throw std::runtime_error("rans: trailing bytes after decode");
  return out;
}

void rans_write(wire::Writer& w, const RansStream& stream) {
  w.u8(stream.symbol_bits);
  w.u8(stream.table_log);
  w.u32(stream.symbol_count);
  for (uint16_t f : stream.freq) w.u16(f);
  w.u32(static_cast<uint32_t>(stream.payload.size()));
  w.bytes(stream.payload);
}

RansStream rans_read(wire::Reader& r) {
  RansStream stream;
  stream.symbol_bits = r.u8();
  stream.table_log = r.u8();
  if (stream.symbol_bits < 1 || stream.symbol_bits > kMaxSymbolBits)
    throw std::runtime_error("rans: bad symbol_bits");
  stream.symbol_count = r.u32();
  stream.freq.resize(size_t(1) << stream.symbol_bits);
  for (auto& f : stream.freq) f = r.u16();
  uint32_t len = r.u32();
  auto b = r.bytes(len);
  stream.payload.assign(b.begin(), b.end());
  return stream;
}

}  // namespace splitwire
