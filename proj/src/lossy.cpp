#include "otpsim/lossy.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

namespace otpsim {

namespace {

constexpr std::uint32_t kReduction[9] = {0,    0,    0x7,  0xB, 0x13,
                                         0x25, 0x43, 0x83, 0x11B};

std::uint32_t mask_bits(int w) { return (1u << w) - 1; }

void check_ltf_params(int n, int k) {
  if (n <= 0 || n > 20 || k <= 0 || k > n)
    throw precondition_error("ltf: need 0 < k <= n <= 20");
}

BitMatrix random_matrix(int rows, int cols, Rng& rng) {
  BitMatrix m(rows);
  for (auto& r : m) r = static_cast<std::uint32_t>(rng()) & mask_bits(cols);
  return m;
}

BitMatrix random_full_rank(int rows, int cols, Rng& rng) {
  const int r = std::min(rows, cols);
  while (true) {
    BitMatrix m = random_matrix(rows, cols, rng);
    if (bitmat_rank(m, cols) == r) return m;
  }
}

void write_u32(std::ostream& os, std::uint32_t v) {
  char buf[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff),
                 static_cast<char>((v >> 24) & 0xff)};
  os.write(buf, 4);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char buf[4];
  if (!is.read(reinterpret_cast<char*>(buf), 4))
    throw sim_error("serialization: truncated input");
  return buf[0] | (buf[1] << 8) | (buf[2] << 16)
       | (static_cast<std::uint32_t>(buf[3]) << 24);
}

}  // namespace

// ---------------------------------------------------------------------------
// GF(2) matrices

std::uint32_t bitmat_apply(const BitMatrix& m, std::uint32_t x) {
  std::uint32_t y = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    y |= static_cast<std::uint32_t>(std::popcount(m[i] & x) & 1) << i;
  return y;
}

BitMatrix bitmat_mul(const BitMatrix& a, const BitMatrix& b, int n) {
  // Row i of a*b = XOR of rows of b selected by the bits of row i of a.
  BitMatrix out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int j = 0; j < n && j < static_cast<int>(b.size()); ++j)
      if ((a[i] >> j) & 1) out[i] ^= b[j];
  return out;
}

int bitmat_rank(BitMatrix m, int n) {
  int rank = 0;
  for (int col = 0; col < n; ++col) {
    std::size_t pivot = m.size();
    for (std::size_t i = rank; i < m.size(); ++i)
      if ((m[i] >> col) & 1) { pivot = i; break; }
    if (pivot == m.size()) continue;
    std::swap(m[rank], m[pivot]);
    for (std::size_t i = 0; i < m.size(); ++i)
      if (i != static_cast<std::size_t>(rank) && ((m[i] >> col) & 1))
        m[i] ^= m[rank];
    ++rank;
  }
  return rank;
}

std::optional<BitMatrix> bitmat_inverse(const BitMatrix& m, int n) {
  BitMatrix a = m, inv(n);
  for (int i = 0; i < n; ++i) inv[i] = 1u << i;
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int i = col; i < n; ++i)
      if ((a[i] >> col) & 1) { pivot = i; break; }
    if (pivot < 0) return std::nullopt;
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    for (int i = 0; i < n; ++i) {
      if (i != col && ((a[i] >> col) & 1)) {
        a[i] ^= a[col];
        inv[i] ^= inv[col];
      }
    }
  }
  return inv;
}

// ---------------------------------------------------------------------------
// GF(2^w)

std::uint32_t gf_mul(int w, std::uint32_t a, std::uint32_t b) {
  if (w < 2 || w > 8) throw precondition_error("gf: width out of range");
  std::uint32_t p = 0;
  while (b) {
    if (b & 1) p ^= a;
    b >>= 1;
    a <<= 1;
    if (a >> w) a ^= kReduction[w];
  }
  return p;
}

std::uint32_t gf_inv(int w, std::uint32_t a) {
  if (a == 0) throw precondition_error("gf: zero has no inverse");
  for (std::uint32_t x = 1; x <= mask_bits(w); ++x)
    if (gf_mul(w, a, x) == 1) return x;
  throw sim_error("gf: inverse not found");
}

// ---------------------------------------------------------------------------
// Toy LTF

ToyLtfKey ltf_gen(LtfMode mode, int n, int k, Rng& rng) {
  check_ltf_params(n, k);
  ToyLtfKey key;
  key.mode = mode;
  key.n = n;
  key.k = k;
  if (mode == LtfMode::inj) {
    while (true) {
      key.pk = random_matrix(n, n, rng);
      auto inv = bitmat_inverse(key.pk, n);
      if (inv) {
        key.sk = *inv;
        return key;
      }
    }
  }
  // Rank exactly n - k: full-rank (n x (n-k)) times full-rank ((n-k) x n).
  const int r = n - k;
  if (r == 0) {
    key.pk.assign(n, 0);
    return key;
  }
  BitMatrix b = random_full_rank(n, r, rng);
  BitMatrix c = random_full_rank(r, n, rng);
  key.pk = bitmat_mul(b, c, r);
  return key;
}

std::uint32_t ltf_eval(const ToyLtfKey& key, std::uint32_t x) {
  if (x > mask_bits(key.n)) throw precondition_error("ltf_eval: input width");
  return bitmat_apply(key.pk, x);
}

std::uint32_t ltf_invert(const ToyLtfKey& key, std::uint32_t y) {
  if (key.mode != LtfMode::inj)
    throw precondition_error("ltf_invert: lossy keys have no trapdoor");
  return bitmat_apply(key.sk, y);
}

std::vector<std::uint32_t> ltf_image(const ToyLtfKey& key) {
  std::vector<bool> seen(1u << key.n, false);
  std::vector<std::uint32_t> out;
  for (std::uint32_t x = 0; x <= mask_bits(key.n); ++x) {
    std::uint32_t y = ltf_eval(key, x);
    if (!seen[y]) {
      seen[y] = true;
      out.push_back(y);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// PIP

PipKey pip_key(int w, std::uint32_t a, std::uint32_t b) {
  if (w < 2 || w > 8) throw precondition_error("pip: width out of range");
  if (a == 0 || a > mask_bits(w) || b > mask_bits(w))
    throw precondition_error("pip: bad coefficients");
  return PipKey{w, a, b};
}

std::uint32_t pip_eval(const PipKey& key, std::uint32_t x) {
  return gf_mul(key.w, key.a, x) ^ key.b;
}

std::uint32_t pip_invert(const PipKey& key, std::uint32_t y) {
  return gf_mul(key.w, gf_inv(key.w, key.a), y ^ key.b);
}

// ---------------------------------------------------------------------------
// PKE from the toy LTF

LossyPkeKey pke_gen(LtfMode mode, int n, int k, int ell, Rng& rng) {
  if (ell <= 0 || ell >= n) throw precondition_error("pke_gen: need 0 < ell < n");
  if (n < 2 || n > 8) throw precondition_error("pke_gen: need 2 <= n <= 8");
  return LossyPkeKey{ltf_gen(mode, n, k, rng), ell};
}

Ciphertext pke_enc_with(const LossyPkeKey& key, std::uint32_t m,
                        std::uint32_t r, std::uint32_t a, std::uint32_t b) {
  const int n = key.ltf.n;
  if (m > mask_bits(key.ell)) throw precondition_error("pke_enc: message width");
  if (r > mask_bits(n - key.ell))
    throw precondition_error("pke_enc: randomness width");
  std::uint32_t x = (m << (n - key.ell)) | r;
  PipKey pip = pip_key(n, a, b);
  return Ciphertext{a, b, ltf_eval(key.ltf, pip_eval(pip, x))};
}

Ciphertext pke_enc(const LossyPkeKey& key, std::uint32_t m, Rng& rng) {
  const int n = key.ltf.n;
  std::uint32_t a = 1 + static_cast<std::uint32_t>(rng() % mask_bits(n));
  std::uint32_t b = static_cast<std::uint32_t>(rng()) & mask_bits(n);
  std::uint32_t r = static_cast<std::uint32_t>(rng()) & mask_bits(n - key.ell);
  return pke_enc_with(key, m, r, a, b);
}

std::uint32_t pke_dec(const LossyPkeKey& key, const Ciphertext& c) {
  if (key.ltf.mode != LtfMode::inj)
    throw precondition_error("pke_dec: lossy keys cannot decrypt");
  PipKey pip = pip_key(key.ltf.n, c.a, c.b);
  std::uint32_t x = pip_invert(pip, ltf_invert(key.ltf, c.y));
  return x >> (key.ltf.n - key.ell);
}

// ---------------------------------------------------------------------------
// Group-action PKE

GroupActionKey ga_gen(GaMode mode, std::uint32_t n_mod, Rng& rng) {
  if (n_mod < 3) throw precondition_error("ga_gen: need N >= 3");
  GroupActionKey key;
  key.mode = mode;
  key.n_mod = n_mod;
  std::uint32_t x0 = static_cast<std::uint32_t>(rng() % n_mod);
  key.g = static_cast<std::uint32_t>(rng() % n_mod);
  key.h = static_cast<std::uint32_t>(rng() % n_mod);
  if (mode == GaMode::lossy) {
    key.k = (key.g + key.h) % n_mod;
  } else {
    do {
      key.k = static_cast<std::uint32_t>(rng() % n_mod);
    } while (key.k == (key.g + key.h) % n_mod);
  }
  key.pk[0] = x0;
  key.pk[1] = (key.g + x0) % n_mod;
  key.pk[2] = (key.h + x0) % n_mod;
  key.pk[3] = (key.k + x0) % n_mod;
  return key;
}

GaCiphertext ga_enc(const GroupActionKey& key, int m, std::uint32_t u) {
  if (m != 0 && m != 1) throw precondition_error("ga_enc: message is one bit");
  const std::uint32_t n = key.n_mod;
  if (m == 0) return GaCiphertext{(u + key.pk[0]) % n, (u + key.pk[1]) % n};
  return GaCiphertext{(u + key.pk[2]) % n, (u + key.pk[3]) % n};
}

GaCiphertext ga_enc(const GroupActionKey& key, int m, Rng& rng) {
  return ga_enc(key, m, static_cast<std::uint32_t>(rng() % key.n_mod));
}

std::optional<int> ga_dec(const GroupActionKey& key, const GaCiphertext& c) {
  const std::uint32_t n = key.n_mod;
  if (c.y1 >= n || c.y2 >= n) return std::nullopt;
  if ((c.y1 + key.g) % n == c.y2) return 0;
  std::uint32_t g2 = (key.k + n - key.h) % n;
  if ((c.y1 + g2) % n == c.y2) return 1;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Audits

std::vector<std::vector<double>> lossiness_audit(const LossyPkeKey& key) {
  const int n = key.ltf.n;
  const int msgs = 1 << key.ell;
  const std::uint32_t rs = 1u << (n - key.ell);
  const double n_ab = static_cast<double>(mask_bits(n)) * (mask_bits(n) + 1);
  if (static_cast<double>(n_ab) * rs > (1 << 22))
    throw precondition_error("lossiness_audit: randomness space too large");
  std::vector<std::vector<double>> tv(msgs, std::vector<double>(msgs, 0.0));
  std::vector<std::vector<int>> hist(msgs, std::vector<int>(1u << n));
  for (std::uint32_t a = 1; a <= mask_bits(n); ++a) {
    for (std::uint32_t b = 0; b <= mask_bits(n); ++b) {
      for (int m = 0; m < msgs; ++m) {
        std::fill(hist[m].begin(), hist[m].end(), 0);
        for (std::uint32_t r = 0; r < rs; ++r)
          ++hist[m][pke_enc_with(key, m, r, a, b).y];
      }
      for (int i = 0; i < msgs; ++i) {
        for (int j = i + 1; j < msgs; ++j) {
          double d = 0.0;
          for (std::uint32_t y = 0; y < (1u << n); ++y)
            d += std::abs(hist[i][y] - hist[j][y]);
          tv[i][j] += 0.5 * d / rs / n_ab;
        }
      }
    }
  }
  for (int i = 0; i < msgs; ++i)
    for (int j = 0; j < i; ++j) tv[i][j] = tv[j][i];
  return tv;
}

std::vector<std::vector<double>> lossiness_audit(const GroupActionKey& key) {
  const std::uint32_t n = key.n_mod;
  std::vector<std::vector<double>> tv(2, std::vector<double>(2, 0.0));
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> p0, p1;
  for (std::uint32_t u = 0; u < n; ++u) {
    GaCiphertext c0 = ga_enc(key, 0, u), c1 = ga_enc(key, 1, u);
    p0[{c0.y1, c0.y2}] += 1.0 / n;
    p1[{c1.y1, c1.y2}] += 1.0 / n;
  }
  double d = 0.0;
  for (const auto& [c, p] : p0) {
    auto it = p1.find(c);
    d += std::abs(p - (it == p1.end() ? 0.0 : it->second));
  }
  for (const auto& [c, p] : p1)
    if (!p0.count(c)) d += p;
  tv[0][1] = tv[1][0] = 0.5 * d;
  return tv;
}

double crooked_lhl_bound(int n, int ell, int k) {
  // Min-entropy of x given the image: n - ell bits of randomness must cover
  // ell' = n - k output bits plus 2 log(1/eps) + 1.
  double exponent = (n - ell - (n - k) - 1) / 2.0;
  return 2.0 * std::pow(2.0, -exponent);
}

// ---------------------------------------------------------------------------
// Serialization

void save_key(std::ostream& os, const LossyPkeKey& key) {
  write_u32(os, key.ltf.mode == LtfMode::inj ? 0 : 1);
  write_u32(os, static_cast<std::uint32_t>(key.ltf.n));
  write_u32(os, static_cast<std::uint32_t>(key.ltf.k));
  write_u32(os, static_cast<std::uint32_t>(key.ell));
  for (auto r : key.ltf.pk) write_u32(os, r);
  write_u32(os, static_cast<std::uint32_t>(key.ltf.sk.size()));
  for (auto r : key.ltf.sk) write_u32(os, r);
}

LossyPkeKey load_pke_key(std::istream& is) {
  LossyPkeKey key;
  key.ltf.mode = read_u32(is) == 0 ? LtfMode::inj : LtfMode::lossy;
  key.ltf.n = static_cast<int>(read_u32(is));
  key.ltf.k = static_cast<int>(read_u32(is));
  key.ell = static_cast<int>(read_u32(is));
  check_ltf_params(key.ltf.n, key.ltf.k);
  key.ltf.pk.resize(key.ltf.n);
  for (auto& r : key.ltf.pk) r = read_u32(is);
  std::uint32_t sk_rows = read_u32(is);
  if (sk_rows > 32) throw sim_error("load_pke_key: bad trapdoor size");
  key.ltf.sk.resize(sk_rows);
  for (auto& r : key.ltf.sk) r = read_u32(is);
  return key;
}

void save_ciphertext(std::ostream& os, const Ciphertext& c) {
  write_u32(os, c.a);
  write_u32(os, c.b);
  write_u32(os, c.y);
}

Ciphertext load_ciphertext(std::istream& is) {
  Ciphertext c;
  c.a = read_u32(is);
  c.b = read_u32(is);
  c.y = read_u32(is);
  return c;
}

}  // namespace otpsim
