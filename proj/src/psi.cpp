#include "fedbench/psi.hpp"

#include <unordered_map>
#include <unordered_set>

#include "fedbench/errors.hpp"
#include "fedbench/paillier.hpp"
#include "fedbench/rng.hpp"

namespace fedbench::psi {

using net::Bus;
using net::Kind;
using net::MessageEnvelope;

namespace {

const char* kModp2048 =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF";

// 256-bit safe prime for test-sized groups.
const char* kTestPrime256 = "ce9f737acc2202f82d9b241627ff0a6cffec01982ad1959857042d9f1b15b7e7";

Group make_group(const char* hex) {
  Group g;
  g.prime = mpz_class(hex, 16);
  g.subgroup_order = (g.prime - 1) / 2;
  return g;
}

void check_unique(const std::vector<EntityId>& ids, const char* side) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (id.empty()) throw InvalidDatasetError(std::string(side) + ": empty entity id");
    if (!seen.insert(id).second)
      throw InvalidDatasetError(std::string(side) + ": duplicate entity id '" + id + "'");
  }
}

mpz_class sample_secret(const Group& group, uint64_t seed) {
  BigRng rng(seed);
  return 2 + rng.below(group.subgroup_order - 3);
}

Bytes encode_batch(const std::vector<mpz_class>& elements) {
  Bytes out;
  put_u32(out, static_cast<uint32_t>(elements.size()));
  for (const auto& e : elements) he::put_mpz(out, e);
  return out;
}

std::vector<mpz_class> decode_batch(const Bytes& payload) {
  ByteReader in(payload);
  uint32_t count = in.u32();
  std::vector<mpz_class> out;
  out.reserve(count);
  for (uint32_t i = 0; i < count; ++i) out.push_back(he::read_mpz(in));
  in.expect_done();
  return out;
}

Bytes encode_pairs(const AlignmentResult& result) {
  Bytes out;
  put_u32(out, static_cast<uint32_t>(result.pairs.size()));
  for (auto [ia, ib] : result.pairs) {
    put_u32(out, ia);
    put_u32(out, ib);
  }
  return out;
}

AlignmentResult decode_pairs(const Bytes& payload) {
  ByteReader in(payload);
  AlignmentResult result;
  uint32_t count = in.u32();
  result.common_count = count;
  for (uint32_t i = 0; i < count; ++i) {
    uint32_t ia = in.u32();
    uint32_t ib = in.u32();
    result.pairs.emplace_back(ia, ib);
  }
  in.expect_done();
  return result;
}

std::vector<mpz_class> blind_ids(const std::vector<EntityId>& ids, const mpz_class& secret,
                                 const Group& group) {
  std::vector<mpz_class> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(blind(hash_to_group(id, group), secret, group));
  return out;
}

}  // namespace

const Group& Group::production() {
  static const Group g = make_group(kModp2048);
  return g;
}

const Group& Group::test() {
  static const Group g = make_group(kTestPrime256);
  return g;
}

mpz_class hash_to_group(const EntityId& id, const Group& group) {
  if (id.empty()) throw InvalidDatasetError("cannot hash an empty entity id");
  // Expand the digest past the prime size so reduction stays near-uniform,
  // then square into the quadratic-residue subgroup.
  size_t want = (mpz_sizeinbase(group.prime.get_mpz_t(), 2) + 7) / 8 + 8;
  for (uint32_t attempt = 0;; ++attempt) {
    Bytes material;
    uint32_t block = 0;
    while (material.size() < want) {
      Bytes msg;
      put_u32(msg, attempt);
      put_u32(msg, block++);
      msg.insert(msg.end(), id.begin(), id.end());
      Fingerprint digest = sha256(msg);
      material.insert(material.end(), digest.begin(), digest.end());
    }
    material.resize(want);
    mpz_class h;
    mpz_import(h.get_mpz_t(), material.size(), 1, 1, 1, 0, material.data());
    h %= group.prime;
    if (h == 0) continue;
    return h * h % group.prime;
  }
}

mpz_class blind(const mpz_class& element, const mpz_class& secret, const Group& group) {
  if (secret < 1 || secret >= group.subgroup_order)
    throw InvalidParameterError("blinding secret out of range");
  if (element <= 0 || element >= group.prime)
    throw InvalidParameterError("element outside the group");
  mpz_class out;
  mpz_powm(out.get_mpz_t(), element.get_mpz_t(), secret.get_mpz_t(), group.prime.get_mpz_t());
  return out;
}

Initiator::Initiator(std::vector<EntityId> ids, const Group& group, uint64_t seed)
    : ids_(std::move(ids)), group_(group), secret_(sample_secret(group, seed)) {
  check_unique(ids_, "party A");
}

void Initiator::start(Bus& bus) {
  bus.send({0, 1, id(), net::party_b(), Kind::PsiBlindedBatch,
            encode_batch(blind_ids(ids_, secret_, group_))});
}

void Initiator::handle(const MessageEnvelope& msg, Bus& bus) {
  if (msg.kind != Kind::PsiBlindedBatch)
    throw ProtocolError("psi initiator: unexpected kind " + std::string(kind_name(msg.kind)));
  if (msg.step == 1 && phase_ == Phase::WaitPeerBatch) {
    peer_single_ = decode_batch(msg.payload);
    phase_ = Phase::WaitDoubleBlind;
    return;
  }
  if (msg.step == 2 && phase_ == Phase::WaitDoubleBlind) {
    std::vector<mpz_class> own_double = decode_batch(msg.payload);
    if (own_double.size() != ids_.size())
      throw ProtocolError("psi initiator: double-blinded batch length mismatch");

    std::unordered_map<std::string, uint32_t> own_index;
    own_index.reserve(own_double.size());
    for (uint32_t i = 0; i < own_double.size(); ++i)
      own_index.emplace(own_double[i].get_str(16), i);

    for (uint32_t j = 0; j < peer_single_.size(); ++j) {
      mpz_class both = blind(peer_single_[j], secret_, group_);
      auto it = own_index.find(both.get_str(16));
      if (it != own_index.end()) result_.pairs.emplace_back(it->second, j);
    }
    std::sort(result_.pairs.begin(), result_.pairs.end());
    result_.common_count = static_cast<uint32_t>(result_.pairs.size());

    bus.send({0, 3, id(), net::party_b(), Kind::PsiIntersection, encode_pairs(result_)});
    phase_ = Phase::Done;
    return;
  }
  throw ProtocolError("psi initiator: message out of order (step " + std::to_string(msg.step) + ")");
}

std::string Initiator::phase_name() const {
  switch (phase_) {
    case Phase::WaitPeerBatch: return "wait-peer-batch";
    case Phase::WaitDoubleBlind: return "wait-double-blind";
    case Phase::Done: return "done";
  }
  return "?";
}

const AlignmentResult& Initiator::result() const {
  if (phase_ != Phase::Done) throw ProtocolError("psi initiator has not finished");
  return result_;
}

Responder::Responder(std::vector<EntityId> ids, const Group& group, uint64_t seed)
    : ids_(std::move(ids)), group_(group), secret_(sample_secret(group, seed)) {
  check_unique(ids_, "party B");
}

void Responder::start(Bus&) {}

void Responder::handle(const MessageEnvelope& msg, Bus& bus) {
  if (msg.kind == Kind::PsiBlindedBatch && phase_ == Phase::WaitPeerBatch) {
    // own singly blinded ids, then the peer's batch blinded a second time
    bus.send({0, 1, id(), net::party_a(), Kind::PsiBlindedBatch,
              encode_batch(blind_ids(ids_, secret_, group_))});
    std::vector<mpz_class> peer = decode_batch(msg.payload);
    for (auto& e : peer) e = blind(e, secret_, group_);
    bus.send({0, 2, id(), net::party_a(), Kind::PsiBlindedBatch, encode_batch(peer)});
    phase_ = Phase::WaitIntersection;
    return;
  }
  if (msg.kind == Kind::PsiIntersection && phase_ == Phase::WaitIntersection) {
    result_ = decode_pairs(msg.payload);
    for (auto [ia, ib] : result_.pairs)
      if (ib >= ids_.size()) throw ProtocolError("psi responder: intersection index out of range");
    phase_ = Phase::Done;
    return;
  }
  throw ProtocolError("psi responder: message out of order (" + std::string(kind_name(msg.kind)) +
                      ")");
}

std::string Responder::phase_name() const {
  switch (phase_) {
    case Phase::WaitPeerBatch: return "wait-peer-batch";
    case Phase::WaitIntersection: return "wait-intersection";
    case Phase::Done: return "done";
  }
  return "?";
}

const AlignmentResult& Responder::result() const {
  if (phase_ != Phase::Done) throw ProtocolError("psi responder has not finished");
  return result_;
}

AlignOutcome align(const std::vector<EntityId>& ids_a, const std::vector<EntityId>& ids_b,
                   uint64_t seed, const Group& group) {
  Initiator a(ids_a, group, derive_seed(seed, 0xA));
  Responder b(ids_b, group, derive_seed(seed, 0xB));
  Bus bus(seed);
  run_protocol({&a, &b}, bus);
  if (a.result().pairs != b.result().pairs)
    throw ProtocolError("psi parties disagree on the intersection");
  return AlignOutcome{a.result(), bus.transcript()};
}

}  // namespace fedbench::psi
