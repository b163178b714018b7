#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fedbench/transport.hpp"

namespace fedbench::psi {

using EntityId = std::string;

// Prime-order subgroup used by the commutative blinding: the quadratic
// residues of a safe prime p = 2q + 1.
struct Group {
  mpz_class prime;           // p
  mpz_class subgroup_order;  // q = (p - 1) / 2

  static const Group& production();  // RFC 3526 2048-bit MODP group
  static const Group& test();        // 256-bit safe prime, test sizes only
};

struct BlindedId {
  mpz_class value;
  net::PartyId owner;
  int blind_count = 1;
};

struct AlignmentResult {
  // (row in A, row in B) for every common id, sorted by A's row order.
  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  uint32_t common_count = 0;
};

// Deterministic hash into the quadratic-residue subgroup.
mpz_class hash_to_group(const EntityId& id, const Group& group);

// e^secret mod p. Commutative: blind(blind(e, a), b) == blind(blind(e, b), a).
mpz_class blind(const mpz_class& element, const mpz_class& secret, const Group& group);

// Two-party DH-style PSI over the transport bus. The initiator (A) learns
// the matched index pairs first and forwards them to the responder, so
// both sides end with the same AlignmentResult. Non-overlapping ids never
// leave their party in any form but a blinded group element.
class Initiator : public net::Party {
 public:
  Initiator(std::vector<EntityId> ids, const Group& group, uint64_t seed);
  net::PartyId id() const override { return net::party_a(); }
  void start(net::Bus& bus) override;
  void handle(const net::MessageEnvelope& msg, net::Bus& bus) override;
  bool terminal() const override { return phase_ == Phase::Done; }
  std::string phase_name() const override;
  const AlignmentResult& result() const;

 private:
  enum class Phase { WaitPeerBatch, WaitDoubleBlind, Done };
  std::vector<EntityId> ids_;
  const Group& group_;
  mpz_class secret_;
  std::vector<mpz_class> peer_single_;  // B's singly blinded ids
  Phase phase_ = Phase::WaitPeerBatch;
  AlignmentResult result_;
};

class Responder : public net::Party {
 public:
  Responder(std::vector<EntityId> ids, const Group& group, uint64_t seed);
  net::PartyId id() const override { return net::party_b(); }
  void start(net::Bus& bus) override;
  void handle(const net::MessageEnvelope& msg, net::Bus& bus) override;
  bool terminal() const override { return phase_ == Phase::Done; }
  std::string phase_name() const override;
  const AlignmentResult& result() const;

 private:
  enum class Phase { WaitPeerBatch, WaitIntersection, Done };
  std::vector<EntityId> ids_;
  const Group& group_;
  mpz_class secret_;
  Phase phase_ = Phase::WaitPeerBatch;
  AlignmentResult result_;
};

struct AlignOutcome {
  AlignmentResult result;
  net::Transcript transcript;
};

// Run the exchange on an in-memory bus and return both parties' agreed
// result plus the recorded transcript.
AlignOutcome align(const std::vector<EntityId>& ids_a, const std::vector<EntityId>& ids_b,
                   uint64_t seed, const Group& group = Group::production());

}  // namespace fedbench::psi
