#include "splitwire/payload.hpp"

#include <fstream>
#include <stdexcept>

#include "splitwire/threshold_split.hpp"

namespace splitwire {

namespace {

constexpr uint32_t kPayloadMagic = 0x31505753;  // "SWP1" little-endian
constexpr uint8_t kPayloadVersion = 1;

}  // namespace

size_t CompressedPayload::above_bytes() const { return above.wire_size_bytes(); }

size_t CompressedPayload::below_bytes() const {
  size_t n = 0;
  for (const auto& rec : row_records) {
    n += 1 + 4 + 4 + rec.sign_bitmap.size() + rec.stream.wire_size_bytes();
  }
  return n;
}

size_t CompressedPayload::size_bytes() const { return kHeaderBytes + above_bytes() + below_bytes(); }

QuantRow CompressedPayload::quant_row(uint32_t r) const {
  const RowRecord& rec = row_records.at(r);
  QuantRow q;
  q.bits = rec.bits;
  q.scale = rec.scale;
  q.zero = rec.zero;
  q.codes = rans_decode(rec.stream);
  q.sign_bitmap = rec.sign_bitmap;
  q.count = rec.stream.symbol_count;
  return q;
}

CompressedPayload compress(const ActivationTensor& t, float tau, const TabqConfig& cfg,
                           const PayloadMeta& meta) {
  cfg.validate();
  if (uint64_t(meta.heads) * meta.head_dim != t.cols())
    throw std::invalid_argument("compress: heads*head_dim must equal tensor cols");

  CompressedPayload p;
  p.meta = meta;
  p.meta.version = kPayloadVersion;
  p.rows = t.rows();
  p.tau = tau;

  SplitPair pair = threshold_split(t, tau);
  p.above = std::move(pair.above);

  p.row_records.reserve(t.rows());
  for (const QuantRow& q : tabq_tensor(pair.below, cfg)) {
    RowRecord rec;
    rec.bits = q.bits;
    rec.scale = q.scale;
    rec.zero = q.zero;
    rec.sign_bitmap = q.sign_bitmap;
    rec.stream = rans_encode(q.codes, q.bits - 1);
    p.row_records.push_back(std::move(rec));
  }
  return p;
}

ActivationTensor decompress(const CompressedPayload& p) {
  const uint32_t cols = p.cols();
  if (cols == 0) throw std::runtime_error("payload: zero hidden width");
  if (p.row_records.size() != p.rows) throw std::runtime_error("payload: row record count mismatch");

  std::vector<float> data(size_t(p.rows) * cols, 0.0f);
  for (uint32_t r = 0; r < p.rows; ++r) {
    QuantRow q = p.quant_row(r);
    if (q.count != cols) throw std::runtime_error("payload: row length mismatch");
    std::vector<float> vals = dequantize(q);
    std::copy(vals.begin(), vals.end(), data.begin() + size_t(r) * cols);
  }

  ActivationTensor below(p.rows, cols, std::move(data));
  SplitPair pair{p.above, std::move(below), p.tau};
  return merge(pair);
}

size_t payload_size_bytes(const CompressedPayload& p) { return p.size_bytes(); }

size_t baseline_size_bytes(uint32_t rows, uint32_t cols) {
  return 12 + 4 * size_t(rows) * cols;
}

std::vector<uint8_t> payload_to_bytes(const CompressedPayload& p) {
  wire::Writer w;
  w.u32(kPayloadMagic);
  w.u8(p.meta.version);
  w.u8(p.meta.kv_slice ? 1 : 0);
  w.u16(p.meta.layer);
  w.u32(p.rows);
  w.u16(p.meta.heads);
  w.u16(p.meta.head_dim);
  w.f32(p.tau);
  w.u32(0);  // reserved, pads the header to 24 bytes
  csr_write(w, p.above);
  for (const auto& rec : p.row_records) {
    w.u8(static_cast<uint8_t>(rec.bits));
    w.f32(rec.scale);
    w.i32(rec.zero);
    w.bytes(rec.sign_bitmap);
    rans_write(w, rec.stream);
  }
  return w.take();
}

CompressedPayload payload_from_bytes(std::span<const uint8_t> bytes) {
  wire::Reader r(bytes);
  if (r.u32() != kPayloadMagic) throw std::runtime_error("payload: bad magic");
  CompressedPayload p;
  p.meta.version = r.u8();
  if (p.meta.version != kPayloadVersion) throw std::runtime_error("payload: unsupported version");
  uint8_t flags = r.u8();
  if (flags & ~uint8_t(1)) throw std::runtime_error("payload: unknown flags");
  p.meta.kv_slice = flags & 1;
  p.meta.layer = r.u16();
  p.rows = r.u32();
  p.meta.heads = r.u16();
  p.meta.head_dim = r.u16();
  p.tau = r.f32();
  r.u32();  // reserved

  const uint32_t cols = p.cols();
  if (cols == 0) throw std::runtime_error("payload: zero hidden width");
  p.above = csr_read(r, p.rows, cols);

  p.row_records.resize(p.rows);
  for (auto& rec : p.row_records) {
    rec.bits = r.u8();
    if (rec.bits < 2 || rec.bits > 16) throw std::runtime_error("payload: bad row bit-width");
    rec.scale = r.f32();
    rec.zero = r.i32();
    auto signs = r.bytes((size_t(cols) + 7) / 8);
    rec.sign_bitmap.assign(signs.begin(), signs.end());
    rec.stream = rans_read(r);
    if (rec.stream.symbol_count != cols) throw std::runtime_error("payload: row length mismatch");
    if (rec.stream.symbol_bits != rec.bits - 1)
      throw std::runtime_error("payload: stream width inconsistent with the row bit-width");
  }
  if (!r.done()) throw std::runtime_error("payload: trailing bytes");
  return p;
}

void save_payload(const std::string& path, const CompressedPayload& p) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  auto bytes = payload_to_bytes(p);
  f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

CompressedPayload load_payload(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return payload_from_bytes(bytes);
}

}  // namespace splitwire
