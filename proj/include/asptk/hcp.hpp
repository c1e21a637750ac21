#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "asptk/incremental.hpp"
#include "asptk/solver.hpp"
#include "asptk/syntax.hpp"

//! The house configuration problem: persons own things, things go into
//! cabinets, cabinets into rooms, subject to six requirements plus an
//! ordering rule over the numbering. This module bundles the reference
//! encoding, a scaled instance generator, an imperative solution checker
//! that is independent of the declarative semantics, and the fact batching
//! used by the incremental driver.
namespace asptk::hcp {

struct InstanceSpec {
  int persons = 1;
  int things_per_person = 10;
  int cabinets_per_person = 2;
  int rooms_per_person = 1;
};

//! Deterministic instance: person p owns things (p-1)*tpp+1 .. p*tpp, and
//! the cabinet/room domains grow by the same contiguous scheme. Facts are
//! grouped per person, domains last within the group.
std::vector<Atom> gen_instance(const InstanceSpec& spec);

//! One fact per line, in input order.
std::string render_facts(const std::vector<Atom>& facts);

//! Projection of a model onto the configuration predicates. used_cabinets
//! covers both cabinets holding a thing and declared cabinet/1 atoms (the
//! encoding declares every cabinet below an active one).
struct HcpSolution {
  std::set<std::pair<long long, long long>> cabinet_to_thing;
  std::set<std::pair<long long, long long>> room_to_cabinet;
  std::set<long long> used_cabinets;
  std::set<long long> used_rooms;
};

HcpSolution project_solution(const AnswerSet& a);

//! Checks the candidate against the requirements by direct counting:
//! (1) every thing in exactly one cabinet, (2) at most five things per
//! cabinet, (3) every used cabinet in exactly one room, (4) at most four
//! cabinets per room, (5) cabinets are single-person, (6) rooms are
//! single-person, plus the ordering rule (a lower-numbered cabinet never
//! holds a higher-numbered thing than a higher-numbered cabinet) and
//! domain membership of all referenced ids. Empty result means valid.
std::vector<std::string> verify_solution(const std::vector<Atom>& instance,
                                         const AnswerSet& candidate);

//! Splits an instance into persons-per-iteration batches: batch k carries
//! the person/thing/personTOthing facts of persons (k-1)*ppi+1 .. k*ppi
//! plus their share of the domain facts. Batches partition the instance;
//! facts that belong to no person land in the first batch.
std::vector<FactBatch> batch_facts(const std::vector<Atom>& instance, int ppi);

//! The reference encoding, and the worked two-person example that comes
//! with it, exactly as bundled (text is authoritative; parse of it is
//! cached).
const std::string& encoding_text();
const Program& encoding();
const std::string& example_instance_text();
const std::string& example_configuration_text();

//! The cabinetTOthing guess rule with its six filter conditions, verbatim.
const std::string& filtered_cabinet_rule_text();

//! Constraint-aware variant of the encoding: the cabinetTOthing rule is the
//! verbatim filtered rule above; every other filtered rule is produced by
//! cag_rewrite at unfold depth 2.
const std::string& cag_encoding_text();
const Program& cag_encoding();

} // namespace asptk::hcp
