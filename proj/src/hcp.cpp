#include "asptk/hcp.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "asptk/cag.hpp"
#include "asptk/parser.hpp"
#include "asptk/printer.hpp"

namespace asptk::hcp {

/////////////////////////////////////////////////////////////////////////////
// bundled texts
/////////////////////////////////////////////////////////////////////////////

// Reference encoding. The requirements, in encoding order: things go into
// exactly one cabinet (lower bound by count, upper bound pairwise), cabinet
// capacity five, cabinets go into exactly one room, room capacity four,
// cabinets and rooms are single-person, and the ordering rule over the
// cabinet/thing numbering. The two closing rule pairs declare every cabinet
// and room below an active one and close declarations under use.
// Some listing lines end in a single space; the text is kept byte-exact, so
// those spaces are spelled right before the \n escapes below.
const std::string& encoding_text() {
  static const std::string text =
      "cabinet(C)   :- cabinetDomain(C), not cabinet_n(C).\n"
      "cabinet_n(C) :- cabinetDomain(C), not cabinet(C).\n"
      "\n"
      "room(R)   :- roomDomain(R), not room_n(R).\n"
      "room_n(R) :- roomDomain(R), not room(R).\n"
      "\n"
      "cabinetTOthing(C,T)   :- thing(T), cabinetDomain(C), not cabinetTOthing_n(C,T).\n"
      "cabinetTOthing_n(C,T) :- thing(T), cabinetDomain(C), not cabinetTOthing(C,T).\n"
      ":- 1 > #count { C : cabinetTOthing(C,T) }, thing(T). \n"
      ":- cabinetTOthing(C1,T), cabinetTOthing(C2,T), C1 < C2. \n"
      ":- 6 <= #count { T : cabinetTOthing(C,T), thing(T) }, cabinet(C). \n"
      ":- cabinetTOthing(C1,T1), cabinetTOthing(C2,T2), C1 < C2, T1 > T2. \n"
      "\n"
      "\n"
      "roomTOcabinet(R,C) :- cabinet(C), roomDomain(R), not roomTOcabinet_n(R,C).\n"
      "roomTOcabinet_n(R,C) :- cabinet(C), roomDomain(R), not roomTOcabinet(R,C).\n"
      ":- 1 > #count { R : roomTOcabinet(R,C) }, cabinet(C). \n"
      ":- roomTOcabinet(R1,C), roomTOcabinet(R2,C), R1 < R2. \n"
      ":- 5 <= #count { C : roomTOcabinet(R,C), cabinetDomain(C) }, room(R). \n"
      "\n"
      "personTOcabinet(P,C) :- personTOthing(P,T), cabinetTOthing(C,T). \n"
      ":- personTOcabinet(P1, C), personTOcabinet(P2, C), P1 < P2. \n"
      "personTOroom(P,R) :- personTOcabinet(P,C), roomTOcabinet(R,C). \n"
      ":- personTOroom(P1,R), personTOroom(P2,R), P1 < P2. \n"
      "\n"
      "room(R1) :- roomDomain(R1), roomDomain(R2), room(R2), R1 < R2.\n"
      "cabinet(C1) :- cabinetDomain(C1), cabinetDomain(C2), cabinet(C2), C1 < C2.\n"
      "\n"
      "room(R) :- roomTOcabinet(R,C).\n"
      "cabinet(C) :- cabinetTOthing(C,T).\n";
  return text;
}

const Program& encoding() {
  static const Program p = parse_program(encoding_text());
  return p;
}

const std::string& example_instance_text() {
  static const std::string text =
      R"(person(1). thing(1). thing(2). personTOthing(1,1). personTOthing(1,2).
person(2). thing(3). thing(4). personTOthing(2,3). personTOthing(2,4).
roomDomain(1). roomDomain(2). cabinetDomain(1). cabinetDomain(2).
)";
  return text;
}

const std::string& example_configuration_text() {
  static const std::string text =
      R"(cabinetTOthing(1,1). cabinetTOthing(1,2). roomTOcabinet(1,1).
cabinetTOthing(2,3). cabinetTOthing(2,4). roomTOcabinet(2,2).
)";
  return text;
}

// Filters, in order: the two orientations of the shared-thing pair
// constraint, the two orientations of the ordering constraint, and the two
// orientations of the person-exclusivity constraint after unfolding
// personTOcabinet twice.
const std::string& filtered_cabinet_rule_text() {
  static const std::string text =
      "cabinetTOthing(C,T) :- thing(T), cabinetDomain(C), not cabinetTOthing_n(C,T),  \n"
      "    #count{1: cabinetTOthing(C1,T), C < C1 } <1, \n"
      "    #count{1: cabinetTOthing(C1,T),  C1 < C } <1, \n"
      "    #count{1: cabinetTOthing(C1,T1), C1 < C, T1 > T } <1, \n"
      "    #count{1: cabinetTOthing(C1,T1), C < C1, T > T1 } <1, \n"
      "    #count{1: personTOthing(P1,T), personTOthing(P2,T2), cabinetTOthing(C,T2), P1<P2}<1, \n"
      "    #count{1: personTOthing(P1,T1), personTOthing(P2,T), cabinetTOthing(C,T1), P1<P2}<1. \n";
  return text;
}

const std::string& cag_encoding_text() {
  static const std::string text = [] {
    Program rewritten = cag_rewrite(encoding(), RewriteOptions{});
    std::ostringstream out;
    for (const auto& r : rewritten.rules) {
      if (r.head && r.head->predicate == "cabinetTOthing")
        out << filtered_cabinet_rule_text();
      else
        out << render_rule(r) << '\n';
    }
    return out.str();
  }();
  return text;
}

const Program& cag_encoding() {
  static const Program p = parse_program(cag_encoding_text());
  return p;
}

/////////////////////////////////////////////////////////////////////////////
// instance generation and batching
/////////////////////////////////////////////////////////////////////////////

namespace {

Atom a1(const char* pred, long long v) { return {pred, {Term::integer(v)}}; }

Atom a2(const char* pred, long long v, long long w) {
  return {pred, {Term::integer(v), Term::integer(w)}};
}

std::optional<long long> int_arg(const Atom& a, size_t i) {
  if (i >= a.args.size() || a.args[i].kind != TermKind::Integer) return {};
  return a.args[i].value;
}

// Contiguous split of n ids over m persons: the index j id belongs to the
// floor(j / (n/m))-th person, surplus ids to the last one.
size_t rank_of_index(size_t j, size_t n, size_t m) {
  if (m == 0) return 0;
  size_t base = n / m;
  if (base == 0) return std::min(j, m - 1);
  return std::min(j / base, m - 1);
}

} // namespace

std::vector<Atom> gen_instance(const InstanceSpec& spec) {
  std::vector<Atom> out;
  for (long long p = 1; p <= spec.persons; ++p) {
    out.push_back(a1("person", p));
    long long t0 = (p - 1) * spec.things_per_person;
    for (long long k = 1; k <= spec.things_per_person; ++k)
      out.push_back(a1("thing", t0 + k));
    for (long long k = 1; k <= spec.things_per_person; ++k)
      out.push_back(a2("personTOthing", p, t0 + k));
    long long c0 = (p - 1) * spec.cabinets_per_person;
    for (long long k = 1; k <= spec.cabinets_per_person; ++k)
      out.push_back(a1("cabinetDomain", c0 + k));
    long long r0 = (p - 1) * spec.rooms_per_person;
    for (long long k = 1; k <= spec.rooms_per_person; ++k)
      out.push_back(a1("roomDomain", r0 + k));
  }
  return out;
}

std::string render_facts(const std::vector<Atom>& facts) {
  std::ostringstream out;
  for (const auto& a : facts) out << render_atom(a) << ".\n";
  return out.str();
}

std::vector<FactBatch> batch_facts(const std::vector<Atom>& instance, int ppi) {
  ppi = std::max(ppi, 1);
  std::vector<long long> persons;
  std::vector<long long> cabs, rooms;
  std::map<long long, long long> owner; // thing -> first listed person
  for (const auto& a : instance) {
    if (a.predicate == "person" && a.arity() == 1) {
      if (auto v = int_arg(a, 0)) persons.push_back(*v);
    } else if (a.predicate == "cabinetDomain" && a.arity() == 1) {
      if (auto v = int_arg(a, 0)) cabs.push_back(*v);
    } else if (a.predicate == "roomDomain" && a.arity() == 1) {
      if (auto v = int_arg(a, 0)) rooms.push_back(*v);
    } else if (a.predicate == "personTOthing" && a.arity() == 2) {
      auto p = int_arg(a, 0);
      auto t = int_arg(a, 1);
      if (p && t && !owner.count(*t)) owner[*t] = *p;
    }
  }
  std::sort(persons.begin(), persons.end());
  persons.erase(std::unique(persons.begin(), persons.end()), persons.end());
  std::sort(cabs.begin(), cabs.end());
  std::sort(rooms.begin(), rooms.end());

  std::map<long long, size_t> person_rank;
  for (size_t i = 0; i < persons.size(); ++i) person_rank[persons[i]] = i;
  std::map<long long, size_t> cab_rank, room_rank;
  for (size_t i = 0; i < cabs.size(); ++i)
    cab_rank[cabs[i]] = rank_of_index(i, cabs.size(), persons.size());
  for (size_t i = 0; i < rooms.size(); ++i)
    room_rank[rooms[i]] = rank_of_index(i, rooms.size(), persons.size());

  size_t nbatches =
      persons.empty() ? 1 : (persons.size() + ppi - 1) / static_cast<size_t>(ppi);
  std::vector<FactBatch> out(nbatches);
  for (size_t k = 0; k < nbatches; ++k) out[k].index = static_cast<int>(k) + 1;

  auto batch_of_rank = [&](size_t rank) { return rank / static_cast<size_t>(ppi); };
  for (const auto& a : instance) {
    size_t b = 0; // unattributable facts go first
    std::optional<long long> v = int_arg(a, 0);
    if (a.predicate == "person" && v && person_rank.count(*v)) {
      b = batch_of_rank(person_rank[*v]);
    } else if (a.predicate == "personTOthing" && v && person_rank.count(*v)) {
      b = batch_of_rank(person_rank[*v]);
    } else if (a.predicate == "thing" && v && owner.count(*v) &&
               person_rank.count(owner[*v])) {
      b = batch_of_rank(person_rank[owner[*v]]);
    } else if (a.predicate == "cabinetDomain" && v && cab_rank.count(*v)) {
      b = batch_of_rank(cab_rank[*v]);
    } else if (a.predicate == "roomDomain" && v && room_rank.count(*v)) {
      b = batch_of_rank(room_rank[*v]);
    }
    out[b].facts.push_back(a);
  }
  return out;
}

/////////////////////////////////////////////////////////////////////////////
// solution checking
/////////////////////////////////////////////////////////////////////////////

HcpSolution project_solution(const AnswerSet& a) {
  HcpSolution s;
  for (const auto& atom : a.atoms) {
    if (atom.predicate == "cabinetTOthing" && atom.arity() == 2) {
      auto c = int_arg(atom, 0);
      auto t = int_arg(atom, 1);
      if (c && t) s.cabinet_to_thing.emplace(*c, *t);
    } else if (atom.predicate == "roomTOcabinet" && atom.arity() == 2) {
      auto r = int_arg(atom, 0);
      auto c = int_arg(atom, 1);
      if (r && c) s.room_to_cabinet.emplace(*r, *c);
    } else if (atom.predicate == "cabinet" && atom.arity() == 1) {
      if (auto c = int_arg(atom, 0)) s.used_cabinets.insert(*c);
    } else if (atom.predicate == "room" && atom.arity() == 1) {
      if (auto r = int_arg(atom, 0)) s.used_rooms.insert(*r);
    }
  }
  for (const auto& [c, t] : s.cabinet_to_thing) s.used_cabinets.insert(c);
  for (const auto& [r, c] : s.room_to_cabinet) s.used_rooms.insert(r);
  return s;
}

std::vector<std::string> verify_solution(const std::vector<Atom>& instance,
                                         const AnswerSet& candidate) {
  std::set<long long> things, cab_domain, room_domain;
  std::map<long long, std::set<long long>> owners; // thing -> persons
  for (const auto& a : instance) {
    auto v = int_arg(a, 0);
    if (!v) continue;
    if (a.predicate == "thing" && a.arity() == 1) things.insert(*v);
    else if (a.predicate == "cabinetDomain" && a.arity() == 1) cab_domain.insert(*v);
    else if (a.predicate == "roomDomain" && a.arity() == 1) room_domain.insert(*v);
    else if (a.predicate == "personTOthing" && a.arity() == 2) {
      if (auto t = int_arg(a, 1)) owners[*t].insert(*v);
    }
  }

  HcpSolution s = project_solution(candidate);
  std::vector<std::string> out;
  auto fail = [&out](const std::string& msg) { out.push_back(msg); };
  auto num = [](long long v) { return std::to_string(v); };

  // referenced ids must exist
  for (const auto& [c, t] : s.cabinet_to_thing) {
    if (!cab_domain.count(c))
      fail("cabinetTOthing(" + num(c) + "," + num(t) + "): cabinet outside cabinetDomain");
    if (!things.count(t))
      fail("cabinetTOthing(" + num(c) + "," + num(t) + "): unknown thing");
  }
  for (const auto& [r, c] : s.room_to_cabinet) {
    if (!room_domain.count(r))
      fail("roomTOcabinet(" + num(r) + "," + num(c) + "): room outside roomDomain");
    if (!cab_domain.count(c))
      fail("roomTOcabinet(" + num(r) + "," + num(c) + "): cabinet outside cabinetDomain");
  }
  for (long long c : s.used_cabinets)
    if (!cab_domain.count(c)) fail("cabinet " + num(c) + " outside cabinetDomain");
  for (long long r : s.used_rooms)
    if (!room_domain.count(r)) fail("room " + num(r) + " outside roomDomain");

  std::map<long long, std::vector<long long>> cab_things, room_cabs, thing_cabs;
  for (const auto& [c, t] : s.cabinet_to_thing) {
    cab_things[c].push_back(t);
    thing_cabs[t].push_back(c);
  }
  for (const auto& [r, c] : s.room_to_cabinet) room_cabs[r].push_back(c);

  // requirement 1: every thing in exactly one cabinet
  for (long long t : things) {
    auto it = thing_cabs.find(t);
    size_t n = it == thing_cabs.end() ? 0 : it->second.size();
    if (n == 0) fail("requirement 1: thing " + num(t) + " is in no cabinet");
    else if (n > 1)
      fail("requirement 1: thing " + num(t) + " is in " + std::to_string(n) + " cabinets");
  }
  // requirement 2: at most five things per cabinet
  for (const auto& [c, ts] : cab_things)
    if (ts.size() > 5)
      fail("requirement 2: cabinet " + num(c) + " holds " + std::to_string(ts.size()) +
           " things (capacity 5)");
  // requirement 3: every used cabinet in exactly one room
  for (long long c : s.used_cabinets) {
    size_t n = 0;
    for (const auto& [r, cc] : s.room_to_cabinet) {
      (void)r;
      if (cc == c) ++n;
    }
    if (n == 0) fail("requirement 3: cabinet " + num(c) + " is in no room");
    else if (n > 1)
      fail("requirement 3: cabinet " + num(c) + " is in " + std::to_string(n) + " rooms");
  }
  // requirement 4: at most four cabinets per room
  for (const auto& [r, cs] : room_cabs)
    if (cs.size() > 4)
      fail("requirement 4: room " + num(r) + " holds " + std::to_string(cs.size()) +
           " cabinets (capacity 4)");

  auto persons_of_cabinet = [&](long long c) {
    std::set<long long> ps;
    auto it = cab_things.find(c);
    if (it != cab_things.end())
      for (long long t : it->second) {
        auto o = owners.find(t);
        if (o != owners.end()) ps.insert(o->second.begin(), o->second.end());
      }
    return ps;
  };
  // requirement 5: cabinets are single-person
  for (const auto& [c, ts] : cab_things) {
    (void)ts;
    auto ps = persons_of_cabinet(c);
    if (ps.size() > 1)
      fail("requirement 5: cabinet " + num(c) + " belongs to " +
           std::to_string(ps.size()) + " persons");
  }
  // requirement 6: rooms are single-person
  for (const auto& [r, cs] : room_cabs) {
    std::set<long long> ps;
    for (long long c : cs) {
      auto pc = persons_of_cabinet(c);
      ps.insert(pc.begin(), pc.end());
    }
    if (ps.size() > 1)
      fail("requirement 6: room " + num(r) + " belongs to " + std::to_string(ps.size()) +
           " persons");
  }
  // ordering rule: no lower-numbered cabinet holds a higher-numbered thing
  // than any higher-numbered cabinet. Scan cabinets in ascending order and
  // compare each against the largest thing seen in lower cabinets.
  long long seen_max_thing = 0, seen_max_cab = 0;
  bool seen_any = false;
  for (const auto& [c, ts] : cab_things) { // std::map: ascending by cabinet
    long long mn = *std::min_element(ts.begin(), ts.end());
    if (seen_any && mn < seen_max_thing)
      fail("ordering: cabinet " + num(seen_max_cab) + " holds thing " +
           num(seen_max_thing) + " while higher cabinet " + num(c) +
           " holds thing " + num(mn));
    long long mx = *std::max_element(ts.begin(), ts.end());
    if (!seen_any || mx > seen_max_thing) {
      seen_max_thing = mx;
      seen_max_cab = c;
    }
    seen_any = true;
  }
  return out;
}

} // namespace asptk::hcp
