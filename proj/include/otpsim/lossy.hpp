#pragma once

// Lossy public-key encryption two ways: a toy lossy trapdoor function over
// GF(2) composed with pairwise-independent permutations over GF(2^w), and a
// group-action scheme over Z_N. Both come with exact lossiness audits.
//
// Neither toy hides its mode computationally; they reproduce the structural
// properties (injectivity, image size, statistical lossiness) only.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "otpsim/qsim.hpp"

namespace otpsim {

// ---------------------------------------------------------------------------
// GF(2) matrices (rows as bit masks, bit i = column i)

using BitMatrix = std::vector<std::uint32_t>;

std::uint32_t bitmat_apply(const BitMatrix& m, std::uint32_t x);
BitMatrix bitmat_mul(const BitMatrix& a, const BitMatrix& b, int n);
int bitmat_rank(BitMatrix m, int n);
std::optional<BitMatrix> bitmat_inverse(const BitMatrix& m, int n);

// ---------------------------------------------------------------------------
// GF(2^w), 2 <= w <= 8

std::uint32_t gf_mul(int w, std::uint32_t a, std::uint32_t b);
std::uint32_t gf_inv(int w, std::uint32_t a);

// ---------------------------------------------------------------------------
// Toy lossy trapdoor function

enum class LtfMode { inj, lossy };

struct ToyLtfKey {
  LtfMode mode = LtfMode::inj;
  int n = 0;
  int k = 0;
  BitMatrix pk;
  BitMatrix sk;  // inverse of pk, inj mode only
};

ToyLtfKey ltf_gen(LtfMode mode, int n, int k, Rng& rng);
std::uint32_t ltf_eval(const ToyLtfKey& key, std::uint32_t x);
std::uint32_t ltf_invert(const ToyLtfKey& key, std::uint32_t y);
std::vector<std::uint32_t> ltf_image(const ToyLtfKey& key);

// ---------------------------------------------------------------------------
// Pairwise-independent permutations: y = a*x + b over GF(2^w)

struct PipKey {
  int w = 0;
  std::uint32_t a = 1;
  std::uint32_t b = 0;
};

PipKey pip_key(int w, std::uint32_t a, std::uint32_t b);
std::uint32_t pip_eval(const PipKey& key, std::uint32_t x);
std::uint32_t pip_invert(const PipKey& key, std::uint32_t y);

// ---------------------------------------------------------------------------
// PKE from the toy LTF: x = m || r, y = F(pk, pi_{a,b}(x)), c = (a, b, y)

struct LossyPkeKey {
  ToyLtfKey ltf;
  int ell = 0;  // message width; randomness width is n - ell
};

struct Ciphertext {
  std::uint32_t a = 1;
  std::uint32_t b = 0;
  std::uint32_t y = 0;
};

LossyPkeKey pke_gen(LtfMode mode, int n, int k, int ell, Rng& rng);
Ciphertext pke_enc(const LossyPkeKey& key, std::uint32_t m, Rng& rng);
Ciphertext pke_enc_with(const LossyPkeKey& key, std::uint32_t m,
                        std::uint32_t r, std::uint32_t a, std::uint32_t b);
std::uint32_t pke_dec(const LossyPkeKey& key, const Ciphertext& c);

// ---------------------------------------------------------------------------
// PKE from a group action (Z_N acting on itself by addition)

enum class GaMode { inj, lossy };

struct GroupActionKey {
  GaMode mode = GaMode::inj;
  std::uint32_t n_mod = 0;  // the modulus N
  std::uint32_t g = 0, h = 0, k = 0;
  std::uint32_t pk[4] = {0, 0, 0, 0};  // x0, g*x0, h*x0, k*x0
};

struct GaCiphertext {
  std::uint32_t y1 = 0;
  std::uint32_t y2 = 0;
};

GroupActionKey ga_gen(GaMode mode, std::uint32_t n_mod, Rng& rng);
GaCiphertext ga_enc(const GroupActionKey& key, int m, std::uint32_t u);
GaCiphertext ga_enc(const GroupActionKey& key, int m, Rng& rng);
// Returns nullopt on ciphertexts that match neither message.
std::optional<int> ga_dec(const GroupActionKey& key, const GaCiphertext& c);

// ---------------------------------------------------------------------------
// Lossiness audits (exact, exhaustive)

// TV between Enc(pk, m_i) and Enc(pk, m_j) for all message pairs, enumerated
// over the full randomness space (a, b, r).
std::vector<std::vector<double>> lossiness_audit(const LossyPkeKey& key);
std::vector<std::vector<double>> lossiness_audit(const GroupActionKey& key);

double crooked_lhl_bound(int n, int ell, int k);

// ---------------------------------------------------------------------------
// Serialization (little-endian u32 fields)

void save_key(std::ostream& os, const LossyPkeKey& key);
LossyPkeKey load_pke_key(std::istream& is);
void save_ciphertext(std::ostream& os, const Ciphertext& c);
Ciphertext load_ciphertext(std::istream& is);

}  // namespace otpsim
