#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "promptrl/checkpoint.hpp"
#include "promptrl/model.hpp"
#include "promptrl/optimizer.hpp"

using namespace promptrl;

namespace {

ModelConfig micro_config() {
  ModelConfig c;
  c.vocab_size = 8;
  c.d_model = 4;
  c.n_layers = 1;
  c.n_heads = 2;
  c.max_len = 8;
  c.seed = 11;
  return c;
}

ModelConfig small_config() {
  ModelConfig c;
  c.vocab_size = 20;
  c.d_model = 16;
  c.n_layers = 2;
  c.n_heads = 4;
  c.max_len = 32;
  c.seed = 5;
  return c;
}

// Randomizes every parameter so layer norms and biases are exercised away from init.
template <typename S>
void jitter(PolicyModel<S>& m, std::uint64_t seed, double sd = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sd);
  for (Eigen::Index k = 0; k < m.num_parameters(); ++k) m.parameters()(k) += static_cast<S>(n(rng));
}

double linear_probe(const PolicyOutput<double>& out, const Eigen::MatrixXd& wl, const Eigen::VectorXd& wv) {
  return (out.logits.array() * wl.array()).sum() + out.values.dot(wv);
}

}  // namespace

TEST_CASE("micro model stays within the finite-difference budget") {
  PolicyModel<double> m(micro_config());
  CHECK(m.num_parameters() <= 500);
}

TEST_CASE("backward matches central differences of a linear probe") {
  PolicyModel<double> m(micro_config());
  jitter(m, 3);
  const TokenSeq toks{1, 4, 2, 7, 3, 5};
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd wl(toks.size(), 8);
  Eigen::VectorXd wv(toks.size());
  for (Eigen::Index k = 0; k < wl.size(); ++k) wl.data()[k] = n(rng);
  for (Eigen::Index k = 0; k < wv.size(); ++k) wv(k) = n(rng);

  const auto tape = m.forward_tape(toks);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(m.num_parameters());
  m.backward(tape, RowMatrix<double>(wl), Vec<double>(wv), grad);

  const double h = 1e-5;
  // absolute floor scaled to the largest entry
  const double floor = 1e-6 * std::max(1.0, grad.cwiseAbs().maxCoeff());
  double worst = 0.0;
  for (Eigen::Index k = 0; k < m.num_parameters(); ++k) {
    const double keep = m.parameters()(k);
    m.parameters()(k) = keep + h;
    const double up = linear_probe(m.forward(toks), wl, wv);
    m.parameters()(k) = keep - h;
    const double down = linear_probe(m.forward(toks), wl, wv);
    m.parameters()(k) = keep;
    const double fd = (up - down) / (2 * h);
    const double rel = std::abs(fd - grad(k)) / std::max({std::abs(fd), std::abs(grad(k)), floor});
    worst = std::max(worst, rel);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("forward is deterministic and causal") {
  PolicyModel<float> m(small_config());
  const TokenSeq a{1, 5, 6, 7, 8, 9};
  const auto o1 = m.forward(a);
  const auto o2 = m.forward(a);
  CHECK(o1.logits == o2.logits);
  CHECK(o1.values == o2.values);

  TokenSeq b = a;
  b[4] = 12;
  b[5] = 3;
  const auto o3 = m.forward(b);
  CHECK(o3.logits.topRows(4) == o1.logits.topRows(4));
  CHECK(o3.values.head(4) == o1.values.head(4));

  const auto lsm = log_softmax_rows<float>(o1.logits);
  for (Eigen::Index r = 0; r < lsm.rows(); ++r) CHECK(std::abs(lsm.row(r).array().exp().sum() - 1.0) < 1e-6);
}

TEST_CASE("overlength input is rejected") {
  PolicyModel<float> m(small_config());
  TokenSeq toks(33, 4);
  CHECK_THROWS_AS(m.forward(toks), std::length_error);
}

TEST_CASE("incremental decoding agrees with the full forward pass") {
  PolicyModel<float> m(small_config());
  jitter(m, 4, 0.1);
  const TokenSeq toks{1, 9, 4, 4, 17, 2, 6};
  const auto full = m.forward(toks);
  auto state = m.begin_decode();
  for (std::size_t k = 0; k < toks.size(); ++k) {
    const auto step = m.decode_step(state, toks[k]);
    CHECK((step.logits.transpose() - full.logits.row(static_cast<Eigen::Index>(k))).cwiseAbs().maxCoeff() < 1e-4f);
    CHECK(std::abs(step.value - full.values(static_cast<Eigen::Index>(k))) < 1e-4f);
  }
}

TEST_CASE("log_prob gathers from the forward pass") {
  PolicyModel<double> m(small_config());
  jitter(m, 8, 0.2);
  const TokenSeq prefix{1, 3, 4};
  const TokenSeq target{7, 8, 2};
  const auto lp = log_prob(m, prefix, target);
  REQUIRE(lp.size() == 3);

  TokenSeq full{1, 3, 4, 7, 8};
  const auto out = m.forward(full);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto row = out.logits.row(static_cast<Eigen::Index>(2 + k));
    double z = 0.0;
    for (Eigen::Index c = 0; c < row.size(); ++c) z += std::exp(row(c));
    const double expect = row(target[k]) - std::log(z);
    CHECK(lp[k] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(lp[k] <= 0.0);
  }
}

TEST_CASE("zeroed LM head gives uniform log-probabilities") {
  auto cfg = small_config();
  PolicyModel<float> m(cfg);
  m.view("lm_head.w").setZero();
  m.view("lm_head.b").setZero();
  const auto lp = log_prob(m, TokenSeq{1, 5}, TokenSeq{6, 7, 8});
  for (double v : lp) CHECK(v == doctest::Approx(-std::log(20.0)).epsilon(1e-6));
}

TEST_CASE("trainable layer selection") {
  PolicyModel<float> m(small_config());
  CHECK_THROWS_AS(m.set_trainable(Trainable::last_k(3)), std::invalid_argument);

  SUBCASE("last_k(1) leaves layer 0 bit-identical after an update") {
    m.set_trainable(Trainable::last_k(1));
    const auto before = m.parameters();
    AdamW opt(m.trainable_indices(), {});
    const auto tape = m.forward_tape(TokenSeq{1, 4, 5, 6});
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(m.num_parameters());
    RowMatrix<float> dl = RowMatrix<float>::Ones(4, 20);
    Vec<float> dv = Vec<float>::Ones(4);
    m.backward(tape, dl, dv, grad);
    opt.step(m.parameters(), grad, 1e-2);
    for (const auto& b : m.manifest()) {
      const bool same = m.parameters().segment(b.offset, b.size()) == before.segment(b.offset, b.size());
      if (b.group == ParamGroup::Layer && b.layer == 0) CHECK(same);
      if (b.group == ParamGroup::Embedding || b.group == ParamGroup::LmHead) CHECK(same);
      if (b.name == "layer1.attn.w_qkv" || b.name == "value_head.w") CHECK_FALSE(same);
    }
  }

  SUBCASE("all updates every parameter with nonzero gradient") {
    m.set_trainable(Trainable::all());
    const auto before = m.parameters();
    AdamW opt(m.trainable_indices(), {});
    const auto tape = m.forward_tape(TokenSeq{1, 4, 5, 6});
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(m.num_parameters());
    RowMatrix<float> dl = RowMatrix<float>::Random(4, 20);
    Vec<float> dv = Vec<float>::Ones(4);
    m.backward(tape, dl, dv, grad);
    opt.step(m.parameters(), grad, 1e-2);
    for (Eigen::Index k = 0; k < grad.size(); ++k) {
      if (grad(k) != 0.0) CHECK(m.parameters()(k) != before(k));
    }
  }
}

TEST_CASE("scaled last-k mapping") {
  CHECK(scaled_last_k(2) == 1);
  CHECK(scaled_last_k(24) == 8);
  CHECK(scaled_last_k(12) == 8);
  CHECK(scaled_last_k(4) == 2);
}

TEST_CASE("reference clone is frozen and equal at copy time") {
  PolicyModel<float> m(small_config());
  const auto ref = clone_reference(m);
  const TokenSeq toks{1, 2, 3};
  CHECK(ref.forward(toks).logits == m.forward(toks).logits);
  const auto snapshot = ref.model().parameters();
  AdamW opt(m.trainable_indices(), {});
  for (int s = 0; s < 100; ++s) {
    Eigen::VectorXd g = Eigen::VectorXd::Ones(m.num_parameters());
    opt.step(m.parameters(), g, 1e-3);
  }
  CHECK(ref.model().parameters() == snapshot);
  CHECK(ref.forward(toks).logits != m.forward(toks).logits);
}

TEST_CASE("checkpoint round trip and integrity errors") {
  const auto dir = std::filesystem::temp_directory_path() / "promptrl_ckpt_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "m.bin";
  PolicyModel<float> m(small_config());
  jitter(m, 2, 0.05);
  Checkpoint ck;
  ck.step = 17;
  ck.vocab = Vocab({"a", "cat"});
  save_checkpoint(path, m, ck);

  auto loaded = load_checkpoint(path);
  CHECK(loaded.model.config() == m.config());
  CHECK(loaded.meta.step == 17);
  REQUIRE(loaded.meta.vocab.has_value());
  CHECK(*loaded.meta.vocab == *ck.vocab);
  const TokenSeq probe{1, 5, 9, 13, 2};
  CHECK(loaded.model.forward(probe).logits == m.forward(probe).logits);
  CHECK(loaded.model.forward(probe).values == m.forward(probe).values);

  SUBCASE("truncated file") {
    const auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size - 9);
    CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
  }
  SUBCASE("flipped payload byte") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(200);
    char c = 0;
    f.read(&c, 1);
    f.seekp(200);
    c = static_cast<char>(c ^ 0x5a);
    f.write(&c, 1);
    f.close();
    CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
  }
  SUBCASE("version mismatch") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    const char v = 99;
    f.write(&v, 1);
    f.close();
    CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("version"), CheckpointError);
  }
}
