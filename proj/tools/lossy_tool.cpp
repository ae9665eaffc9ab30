// Key generation, encryption, decryption, and lossiness audits for the toy
// lossy encryption scheme, with on-disk keys and ciphertexts.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "otpsim/lossy.hpp"

using namespace otpsim;

int main(int argc, char** argv) {
  CLI::App app{"lossy encryption toolbox"};
  app.require_subcommand(1);

  std::string mode = "inj", key_path, ct_path;
  int n = 6, k = 3, ell = 2;
  std::uint64_t seed = 0;
  std::uint32_t message = 0;

  auto* gen = app.add_subcommand("gen", "generate a key pair");
  gen->add_option("--mode", mode, "inj|lossy");
  gen->add_option("--n", n, "input width");
  gen->add_option("--k", k, "lossiness parameter");
  gen->add_option("--ell", ell, "message width");
  gen->add_option("--seed", seed, "randomness seed");
  gen->add_option("--key", key_path, "output key path")->required();

  auto* enc = app.add_subcommand("enc", "encrypt a message");
  enc->add_option("--key", key_path, "key path")->required();
  enc->add_option("--m", message, "message")->required();
  enc->add_option("--seed", seed, "randomness seed");
  enc->add_option("--ct", ct_path, "output ciphertext path")->required();

  auto* dec = app.add_subcommand("dec", "decrypt a ciphertext");
  dec->add_option("--key", key_path, "key path")->required();
  dec->add_option("--ct", ct_path, "ciphertext path")->required();

  auto* audit = app.add_subcommand("audit", "exhaustive lossiness audit");
  audit->add_option("--key", key_path, "key path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (gen->parsed()) {
      Rng rng(seed);
      LtfMode m = mode == "lossy" ? LtfMode::lossy : LtfMode::inj;
      LossyPkeKey key = pke_gen(m, n, k, ell, rng);
      std::ofstream out(key_path, std::ios::binary);
      save_key(out, key);
      return out ? 0 : 1;
    }
    std::ifstream kin(key_path, std::ios::binary);
    if (!kin) {
      std::cerr << "cannot open " << key_path << "\n";
      return 1;
    }
    LossyPkeKey key = load_pke_key(kin);
    if (enc->parsed()) {
      Rng rng(seed);
      Ciphertext c = pke_enc(key, message, rng);
      std::ofstream out(ct_path, std::ios::binary);
      save_ciphertext(out, c);
      return out ? 0 : 1;
    }
    if (dec->parsed()) {
      std::ifstream cin_s(ct_path, std::ios::binary);
      if (!cin_s) {
        std::cerr << "cannot open " << ct_path << "\n";
        return 1;
      }
      Ciphertext c = load_ciphertext(cin_s);
      std::cout << pke_dec(key, c) << "\n";
      return 0;
    }
    auto tv = lossiness_audit(key);
    for (std::size_t i = 0; i < tv.size(); ++i) {
      for (std::size_t j = 0; j < tv[i].size(); ++j)
        std::printf("%s%.12g", j ? " " : "", tv[i][j]);
      std::printf("\n");
    }
    return 0;
  } catch (const sim_error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
