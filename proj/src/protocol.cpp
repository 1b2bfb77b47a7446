#include "pnp/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pnp::proto {

namespace {

constexpr double kSameSpot = 1e-3;  // "same position" slack for claims and lookups
constexpr double kRoot3 = 1.7320508075688772;

bool near(Point a, Point b, double eps = kSameSpot) { return geo::distance(a, b) < eps; }

FrameId fid_of(const SensorState& s) { return msg::frame_id_of(*s.frame); }

int eff_nbr_ord(const NeighborInfo& nb, int id, double now) {
    return now < nb.ord_expires ? nb.ord : id;
}

}  // namespace

const char* role_name(Role r) {
    switch (r) {
        case Role::Free: return "free";
        case Role::Slave: return "slave";
        case Role::Snapped: return "snapped";
        case Role::StoppedPending: return "stopped";
        case Role::Hybrid: return "hybrid";
    }
    return "?";
}

std::int64_t pack_tile(Axial a) {
    return (static_cast<std::int64_t>(a.q) << 32) ^
           static_cast<std::int64_t>(static_cast<std::uint32_t>(a.r));
}

bool moving_condition(int card_p, int card_q, int ord_p, int ord_q) {
    if (card_p > card_q + 1) return true;
    return card_p == card_q + 1 && ord_p > ord_q;
}

int SensorState::effective_ord(double now) const {
    for (const TriggerRecord& t : triggers)
        if (t.deadline > now) return t.adopted_ord;
    return base_ord;
}

namespace {

// ---- motion plan builders --------------------------------------------------

std::vector<Checkpoint> claim_path(Point from, Point target, double stop_at) {
    const double d = geo::distance(from, target);
    Point cp = from;
    if (d > stop_at) cp = target + (stop_at / d) * (from - target);
    return {{cp, CheckTag::ReachClaimPoint, {}}};
}

std::vector<Checkpoint> push_path(Point from, Point dest, const HexFrame& fr) {
    std::vector<Checkpoint> out;
    const auto tiles = geo::tiles_crossed(from, dest, fr);
    const double len = geo::distance(from, dest);
    for (std::size_t i = 1; i < tiles.size(); ++i) {
        auto t = geo::segment_hex_entry(from, dest, fr, tiles[i]);
        if (!t) continue;
        // step a hair past the boundary so the waypoint is inside the tile
        const double adv = std::min(1.0, *t + (len > 1e-9 ? 0.02 / len : 0.0));
        Point p = from + adv * (dest - from);
        const bool last = i + 1 == tiles.size();
        out.push_back({p, last ? CheckTag::EnterDestTile : CheckTag::EnterTile, tiles[i]});
    }
    if (out.empty()) out.push_back({from, CheckTag::EnterDestTile, tiles.front()});
    return out;
}

// ---- the handler visitor ---------------------------------------------------

struct Stepper {
    SensorState& s;
    double now;
    const Context& ctx;
    Effects eff;

    // shorthands
    void send(Message m) { eff.sends.push_back(std::move(m)); }
    void timer(TimerKind k, double deadline, std::int64_t key = 0) {
        eff.set_timers.push_back({{k, key}, deadline});
    }
    void cancel(TimerKind k, std::int64_t key = 0) { eff.cancel_timers.push_back({k, key}); }

    bool same_frame(const FrameId& f) const { return s.frame && f.same(fid_of(s)); }
    Point my_center() const { return geo::axial_center(*s.frame, *s.tile); }

    void announce_card() {
        if (s.card_announced) send(msg::CardinalityInfo{s.id, s.virtual_card});
    }
    void add_slave(int id, Point pos, double energy) {
        if (!s.slaves.count(id)) {
            s.virtual_card += 1;
            announce_card();
        }
        s.slaves[id] = {pos, energy};
        s.cands.erase(id);
    }
    void drop_slave(int id) {
        if (s.slaves.erase(id)) {
            s.virtual_card -= 1;
            announce_card();
        }
    }

    // ---- snapped working-set teardown --------------------------------------

    void clear_snapped() {
        for (const auto& [t, txn] : s.sip_txns) {
            cancel(TimerKind::AckSip, pack_tile(t));
            cancel(TimerKind::IasWait, pack_tile(t));
        }
        s.sip_txns.clear();
        if (s.offer_out) {
            cancel(TimerKind::OfferWait, s.offer_out->txn);
            s.offer_out.reset();
        }
        for (const auto& [txn, from] : s.offers_in) cancel(TimerKind::PushTxnIn, txn);
        s.offers_in.clear();
        if (s.subst_in) {
            cancel(TimerKind::SubstHold, s.subst_in->txn);
            s.subst_in.reset();
        }
        for (const TriggerRecord& t : s.triggers)
            cancel(TimerKind::TriggerExpiry, pack_tile(t.hole_tile));
        s.triggers.clear();
        if (s.pull) {
            cancel(TimerKind::PullRetry);
            s.pull.reset();
        }
        cancel(TimerKind::Discovery);
        cancel(TimerKind::Succession);
        s.slaves.clear();
        s.cands.clear();
        s.nbrs.clear();
        s.vp.clear();
        s.virtual_card = 0;
        s.discovered = false;
        s.card_announced = false;
        s.evidence_inherited = false;
        s.tile.reset();
    }

    void cancel_pull() {
        if (!s.pull) return;
        std::erase_if(s.triggers, [](const TriggerRecord& t) { return t.self_origin; });
        cancel(TimerKind::PullRetry);
        s.pull.reset();
    }

    // ---- becoming snapped ---------------------------------------------------

    void seed_neighborhood() {
        s.vp.clear();
        s.nbrs.clear();
        for (Axial ax : geo::adjacent_axials(*s.tile)) {
            if (!geo::hex_intersects_polygon(*s.frame, ax, *ctx.aoi)) continue;
            const Point c = geo::axial_center(*s.frame, ax);
            int occupant = -1;
            for (const auto& [id, ks] : s.known_snapped)
                if (ks.frame.same(fid_of(s)) && near(ks.center, c)) occupant = id;
            if (occupant >= 0) {
                NeighborInfo nb;
                nb.center = c;
                nb.tile = ax;
                nb.vcard = s.known_snapped[occupant].vcard.value_or(0);
                nb.ord = occupant;
                s.nbrs[occupant] = nb;
            } else {
                s.vp.insert(ax);
            }
        }
    }

    void become_snapped(const HexFrame& frame, Axial tile) {
        s.role = Role::Snapped;
        s.frame = frame;
        s.tile = tile;
        s.owner = -1;
        s.base_ord = s.id;
        // offers accepted while still proceeding to the center stay reserved
        s.virtual_card = static_cast<int>(s.slaves.size() + s.offers_in.size());
        s.discovered = false;
        s.card_announced = false;
        seed_neighborhood();
        send(msg::IAS{s.id, my_center(), frame.starter_ts, frame});
        timer(TimerKind::Discovery, now + ctx.discovery_window());
    }

    void adopt_profile(const Profile& p) {
        s.role = Role::Snapped;
        s.frame = p.frame;
        s.tile = p.tile;
        s.owner = -1;
        s.base_ord = p.base_ord;
        s.slaves.clear();
        for (const auto& [id, se] : p.slaves) s.slaves[id] = {se.first, se.second};
        s.virtual_card = static_cast<int>(s.slaves.size() + s.offers_in.size());
        s.cands.clear();
        s.nbrs.clear();
        for (const auto& [id, nb] : p.neighbors)
            s.nbrs[id] = {nb.center, nb.tile, nb.virtual_card, nb.ord, nb.ord_expires, false};
        s.vp = std::set<Axial>(p.vacant.begin(), p.vacant.end());
        s.triggers = p.triggers;
        for (TriggerRecord& t : s.triggers) {
            if (t.self_origin) {
                s.pull = PullState{t.hole_tile, t.hole, 0};
                t.deadline = std::max(t.deadline, now + ctx.pull_timeout(0));
                timer(TimerKind::PullRetry, t.deadline);
            } else {
                timer(TimerKind::TriggerExpiry, t.deadline, pack_tile(t.hole_tile));
            }
        }
        s.evidence_inherited = p.pull_evidence;
        s.discovered = false;
        s.card_announced = false;
        send(msg::IAS{s.id, geo::axial_center(*s.frame, *s.tile), p.frame.starter_ts, p.frame});
        timer(TimerKind::Discovery, now + ctx.discovery_window());
    }

    Profile build_profile(std::optional<int> exclude_slave = std::nullopt) const {
        Profile p;
        p.base_ord = s.base_ord;
        p.frame = *s.frame;
        p.tile = *s.tile;
        p.triggers = s.triggers;
        for (const auto& [id, nb] : s.nbrs)
            p.neighbors[id] = {nb.center, nb.tile, nb.vcard, nb.ord, nb.ord_expires};
        for (const auto& [id, sl] : s.slaves)
            if (!exclude_slave || id != *exclude_slave) p.slaves[id] = {sl.pos, sl.energy};
        p.vacant.assign(s.vp.begin(), s.vp.end());
        p.pull_evidence = s.evidence_inherited || !s.known_unsnapped.empty();
        return p;
    }

    // ---- evidence gate ------------------------------------------------------

    bool pull_evidence() const {
        if (s.evidence_inherited) return true;
        for (const auto& [id, nb] : s.nbrs)
            if (nb.vcard > 0) return true;
        const double apothem = kRoot3 * ctx.r_s / 2.0;
        for (const auto& [id, pos] : s.known_unsnapped) {
            bool discounted = false;
            for (const auto& [kid, ks] : s.known_snapped) {
                if (!ks.frame.same(fid_of(s))) continue;
                if (ks.vcard.value_or(-1) == 0 && geo::distance(pos, ks.center) <= apothem) {
                    discounted = true;
                    break;
                }
            }
            if (!discounted) return true;
        }
        return false;
    }

    // ---- planning -----------------------------------------------------------

    void plan_snaps() {
        if (s.pull) return;
        std::set<int> engaged;
        for (const auto& [t, txn] : s.sip_txns) engaged.insert(txn.candidate);
        for (Axial t : s.vp) {
            if (s.sip_txns.count(t)) continue;
            const Point target = geo::axial_center(*s.frame, t);
            int best = -1;
            double best_d = std::numeric_limits<double>::infinity();
            auto consider = [&](int id, Point pos) {
                if (engaged.count(id)) return;
                const double d = geo::distance(pos, target);
                if (d < best_d || (d == best_d && id < best)) {
                    best = id;
                    best_d = d;
                }
            };
            for (const auto& [id, sl] : s.slaves) consider(id, sl.pos);
            for (const auto& [id, c] : s.cands) consider(id, c.pos);
            if (best < 0) continue;
            s.sip_txns[t] = {target, best, false, {}};
            engaged.insert(best);
            send(msg::SIP{s.id, best, target, *s.frame});
            timer(TimerKind::AckSip, now + ctx.ack_sip_timeout(), pack_tile(t));
        }
    }

    void plan_push(std::optional<Axial> hole_hint) {
        if (s.offer_out || s.slaves.empty()) return;
        std::optional<Axial> hint = hole_hint;
        if (!hint)
            for (const TriggerRecord& t : s.triggers)
                if (t.deadline > now && !t.self_origin) {
                    hint = t.hole_tile;
                    break;
                }
        const int my_ord = s.effective_ord(now);
        int best = -1;
        // without a hole hint: (vcard, center distance, id); with one: (tiles to hole, id)
        int best_vc = 0, best_hops = 0;
        double best_d = 0.0;
        for (const auto& [id, nb] : s.nbrs) {
            if (nb.push_blocked) continue;
            if (!moving_condition(s.virtual_card, nb.vcard, my_ord, eff_nbr_ord(nb, id, now)))
                continue;
            if (hint) {
                const int hops = geo::tile_distance(nb.tile, *hint);
                if (best < 0 || hops < best_hops || (hops == best_hops && id < best)) {
                    best = id;
                    best_hops = hops;
                }
            } else {
                const double d = geo::distance(nb.center, my_center());
                if (best < 0 || nb.vcard < best_vc ||
                    (nb.vcard == best_vc && (d < best_d || (d == best_d && id < best)))) {
                    best = id;
                    best_vc = nb.vcard;
                    best_d = d;
                }
            }
        }
        if (best < 0) return;
        const long txn = s.fresh_txn();
        s.offer_out = OfferOut{best, txn};
        send(msg::Offer{s.id, best, s.virtual_card, txn});
        timer(TimerKind::OfferWait, now + ctx.offer_timeout(), txn);
    }

    void maybe_start_pull() {
        if (s.pull || s.role != Role::Snapped) return;
        if (s.vp.empty() || !s.slaves.empty() || !s.cands.empty()) return;
        // someone may still push here spontaneously; wait for that instead
        const int my_ord = s.effective_ord(now);
        for (const auto& [id, nb] : s.nbrs)
            if (moving_condition(nb.vcard, s.virtual_card, eff_nbr_ord(nb, id, now), my_ord))
                return;
        if (!pull_evidence()) return;
        Axial hole = *s.vp.begin();  // set order = lexicographic axial, deterministic
        const Point hp = geo::axial_center(*s.frame, hole);
        const double tout = ctx.pull_timeout(0);
        TriggerRecord rec{hp, hole, 0, 0, now + tout, 0, true};
        s.triggers.insert(s.triggers.begin(), rec);
        s.pull = PullState{hole, hp, 0};
        send(msg::HoleInfo{s.id, 0, 0, hp, tout, fid_of(s)});
        timer(TimerKind::PullRetry, now + tout);
    }

    void retire_hybrid() {
        const Point center = my_center();
        send(msg::Retirement{s.id, center});
        std::optional<GoldCmd> cmd = s.hybrid ? s.hybrid->cmd : std::nullopt;
        std::optional<HexFrame> old = s.hybrid ? std::optional(s.hybrid->old_frame) : std::nullopt;
        clear_snapped();
        s.hybrid.reset();
        s.role = Role::Free;
        s.frame.reset();
        s.owner = -1;
        if (cmd) {
            execute_gold_cmd(*cmd, *old);
        } else {
            send(msg::InfoFree{s.id, s.position});
        }
    }

    void execute_gold_cmd(const GoldCmd& cmd, const HexFrame& old_frame) {
        if (const auto* sip = std::get_if<GoldCmdSip>(&cmd)) {
            SnapMission m;
            m.target = sip->target;
            m.tile = geo::owning_axial(sip->frame, sip->target);
            m.frame = sip->frame;
            m.issuer = sip->issuer;
            s.snap_mission = m;
            eff.motion = claim_path(s.position, m.target, ctx.claim_distance());
        } else if (const auto* mv = std::get_if<GoldCmdMove>(&cmd)) {
            PushMission m;
            m.dest = mv->dest;
            m.dest_tile = geo::owning_axial(old_frame, mv->dest);
            m.dest_id = mv->dest_id;
            m.txn = mv->txn;
            m.frame = old_frame;
            s.push_mission = m;
            eff.motion = push_path(s.position, m.dest, old_frame);
        }
    }

    void reconsider(std::optional<Axial> hole_hint = std::nullopt) {
        if (s.role == Role::Hybrid) {
            if (s.slaves.empty()) {
                retire_hybrid();
                return;
            }
        } else if (s.role != Role::Snapped) {
            return;
        }
        if (!s.discovered || !s.frame || !s.tile) return;
        if (s.pull && (!s.vp.count(s.pull->hole_tile) || !s.slaves.empty() || !s.cands.empty()))
            cancel_pull();
        if (!s.slaves.empty() || !s.cands.empty()) s.evidence_inherited = false;
        plan_snaps();
        if (!s.sip_txns.empty()) return;
        if (!s.card_announced) {
            s.card_announced = true;
            send(msg::CardinalityInfo{s.id, s.virtual_card});
        }
        if (!s.slaves.empty())
            plan_push(hole_hint);
        else if (s.role == Role::Snapped)
            maybe_start_pull();
    }

    // ---- travel terminations ------------------------------------------------

    void stop_and_wait() {  // a traveler loses its target mid-route
        eff.stop_motion = true;
        if (s.snap_mission && s.snap_mission->stage == SnapMission::Stage::Claiming)
            cancel(TimerKind::Claim);
        s.snap_mission.reset();
        s.role = Role::StoppedPending;
        s.stop_point = s.position;
        send(msg::InfoStopped{s.id, s.position});
        timer(TimerKind::Iays, now + ctx.iays_timeout());
    }

    void become_slave_of(int owner_id, const HexFrame& frame, Point owner_center,
                         bool announce) {
        s.role = Role::Slave;
        s.owner = owner_id;
        s.frame = frame;
        s.tile = geo::owning_axial(frame, owner_center);
        s.snap_mission.reset();
        if (announce) send(msg::InfoSlave{s.id, s.position, s.energy});
    }

    // ---- IAS ----------------------------------------------------------------

    void on_ias(const msg::IAS& v) {
        const FrameId vid = msg::frame_id_of(v.frame);
        // a new occupant at a center supersedes any stale record of it
        std::erase_if(s.known_snapped, [&](const auto& kv) {
            return kv.first != v.id && kv.second.frame.same(vid) &&
                   near(kv.second.center, v.coordinates);
        });
        s.known_snapped[v.id] = {v.coordinates, vid, s.known_snapped.count(v.id)
                                                         ? s.known_snapped[v.id].vcard
                                                         : std::nullopt};
        s.known_unsnapped.erase(v.id);
        if (!s.oldest_frame_seen || vid.older_than(*s.oldest_frame_seen)) {
            s.oldest_frame_seen = vid;
            s.oldest_frame_full = v.frame;
        }
        switch (s.role) {
            case Role::Free: on_ias_free(v); break;
            case Role::Slave: on_ias_slave(v); break;
            case Role::StoppedPending: on_ias_stopped(v); break;
            case Role::Snapped: on_ias_snapped(v); break;
            case Role::Hybrid: on_ias_hybrid(v); break;
        }
    }

    void on_ias_free(const msg::IAS& v) {
        if (s.snap_mission) {
            SnapMission& m = *s.snap_mission;
            if (!near(v.coordinates, m.target)) return;  // unrelated portion growth
            if (m.stage == SnapMission::Stage::AwaitWinnerIas) {
                become_slave_of(v.id, v.frame, v.coordinates, true);
                return;
            }
            // my target is occupied: stop where I am and re-localize
            eff.stop_motion = true;
            if (m.stage == SnapMission::Stage::Claiming) cancel(TimerKind::Claim);
            s.snap_mission.reset();
            if (geo::point_in_hex(s.position, v.coordinates, v.frame))
                become_slave_of(v.id, v.frame, v.coordinates, true);
            else
                send(msg::InfoFree{s.id, s.position});
            return;
        }
        if (s.push_mission || s.subst_mission) return;  // engaged elsewhere
        if (geo::point_in_hex(s.position, v.coordinates, v.frame))
            become_slave_of(v.id, v.frame, v.coordinates, true);
        else
            send(msg::InfoFree{s.id, s.position});
    }

    void on_ias_slave(const msg::IAS& v) {
        if (v.id == s.owner) {
            send(msg::InfoSlave{s.id, s.position, s.energy});
            return;
        }
        if (s.frame && v.frame.same_portion(*s.frame)) {
            // a snapped sensor standing at my owner's center replaced it
            if (s.tile && near(v.coordinates, geo::axial_center(*s.frame, *s.tile))) {
                s.owner = v.id;
                send(msg::InfoSlave{s.id, s.position, s.energy});
            }
            return;
        }
        if (s.frame && v.frame.older_than(*s.frame)) {
            // absorbed into the older portion: re-localize there
            if (geo::point_in_hex(s.position, v.coordinates, v.frame)) {
                become_slave_of(v.id, v.frame, v.coordinates, true);
            } else {
                s.role = Role::Free;
                s.owner = -1;
                s.frame.reset();
                s.tile.reset();
                send(msg::InfoFree{s.id, s.position});
            }
        }
    }

    void on_ias_stopped(const msg::IAS& v) {
        if (geo::point_in_hex(s.position, v.coordinates, v.frame)) {
            cancel(TimerKind::Iays);
            become_slave_of(v.id, v.frame, v.coordinates, true);
        }
    }

    void on_ias_same_portion_snapped(const msg::IAS& v) {
        const Axial t = geo::owning_axial(*s.frame, v.coordinates);
        if (geo::tile_distance(t, *s.tile) == 1) {
            std::erase_if(s.nbrs, [&](const auto& kv) {
                return kv.first != v.id && kv.second.tile == t;
            });
            auto& nb = s.nbrs[v.id];
            nb.center = geo::axial_center(*s.frame, t);
            nb.tile = t;
            nb.push_blocked = false;
        }
        s.vp.erase(t);
        if (auto it = s.sip_txns.find(t); it != s.sip_txns.end()) {
            cancel(TimerKind::AckSip, pack_tile(t));
            cancel(TimerKind::IasWait, pack_tile(t));
            s.sip_txns.erase(it);
        }
        if (s.pull && s.pull->hole_tile == t) cancel_pull();
        send(msg::InfoSnapped{s.id, my_center(), s.virtual_card, fid_of(s)});
        reconsider();
    }

    void on_ias_snapped(const msg::IAS& v) {
        if (v.frame.same_portion(*s.frame)) {
            on_ias_same_portion_snapped(v);
            return;
        }
        if (v.frame.older_than(*s.frame)) {
            cancel_pull();
            s.hybrid = HybridState{v.frame, std::nullopt, std::nullopt, {}};
            if (s.slaves.empty()) {
                // nothing to hand over: vacate immediately and join the old portion
                send(msg::Retirement{s.id, my_center()});
                clear_snapped();
                s.hybrid.reset();
                s.role = Role::Free;
                s.frame.reset();
                if (geo::point_in_hex(s.position, v.coordinates, v.frame))
                    become_slave_of(v.id, v.frame, v.coordinates, true);
                else
                    send(msg::InfoFree{s.id, s.position});
                return;
            }
            s.role = Role::Hybrid;
            if (geo::point_in_hex(s.position, v.coordinates, v.frame))
                send(msg::InfoSlave{s.id, s.position, s.energy});
            else
                send(msg::InfoFree{s.id, s.position});
            return;
        }
        // newer portion in range: make sure its members hear an older IAS
        if (s.merge_reias.insert(v.id).second)
            send(msg::IAS{s.id, my_center(), s.frame->starter_ts, *s.frame});
    }

    void on_ias_hybrid(const msg::IAS& v) {
        if (v.frame.same_portion(*s.frame)) {
            on_ias_same_portion_snapped(v);
            return;
        }
        if (v.frame.same_portion(s.hybrid->old_frame) ||
            v.frame.older_than(s.hybrid->old_frame)) {
            if (v.frame.older_than(s.hybrid->old_frame)) s.hybrid->old_frame = v.frame;
            if (geo::point_in_hex(s.position, v.coordinates, v.frame))
                send(msg::InfoSlave{s.id, s.position, s.energy});
            else
                send(msg::InfoFree{s.id, s.position});
        }
    }

    // ---- discovery replies and passive listening ----------------------------

    bool same_portion_peer(int id) const {
        auto it = s.known_snapped.find(id);
        return it != s.known_snapped.end() && s.frame && it->second.frame.same(fid_of(s));
    }

    void on_info_snapped(const msg::InfoSnapped& v) {
        std::erase_if(s.known_snapped, [&](const auto& kv) {
            return kv.first != v.id && kv.second.frame.same(v.frame) &&
                   near(kv.second.center, v.coordinates);
        });
        s.known_snapped[v.id] = {v.coordinates, v.frame, v.virtual_cardinality};
        s.known_unsnapped.erase(v.id);
        if ((s.role != Role::Snapped && s.role != Role::Hybrid) || !same_frame(v.frame)) return;
        const Axial t = geo::owning_axial(*s.frame, v.coordinates);
        if (t == *s.tile) return;
        if (geo::tile_distance(t, *s.tile) == 1) {
            std::erase_if(s.nbrs, [&](const auto& kv) {
                return kv.first != v.id && kv.second.tile == t;
            });
            auto& nb = s.nbrs[v.id];
            nb.center = geo::axial_center(*s.frame, t);
            nb.tile = t;
            nb.vcard = v.virtual_cardinality;
            nb.push_blocked = false;
        }
        s.vp.erase(t);
        if (auto it = s.sip_txns.find(t); it != s.sip_txns.end()) {
            cancel(TimerKind::AckSip, pack_tile(t));
            cancel(TimerKind::IasWait, pack_tile(t));
            s.sip_txns.erase(it);
        }
        if (s.pull && s.pull->hole_tile == t) cancel_pull();
        reconsider();
    }

    void on_info_slave(const msg::InfoSlave& v) {
        if (same_portion_peer(v.id)) return;  // a hybrid advertising to an older portion
        s.known_unsnapped[v.id] = v.coordinates;
        if (s.role != Role::Snapped && s.role != Role::Hybrid) return;
        if (!s.tile) return;
        if (geo::point_in_hex(v.coordinates, my_center(), *s.frame)) {
            add_slave(v.id, v.coordinates, v.energy_level);
        } else {
            drop_slave(v.id);
            s.cands.erase(v.id);
        }
        reconsider();
    }

    void on_info_free(const msg::InfoFree& v) {
        if (same_portion_peer(v.id)) return;
        s.known_unsnapped[v.id] = v.coordinates;
        if (s.role != Role::Snapped && s.role != Role::Hybrid) return;
        drop_slave(v.id);
        s.cands[v.id] = {v.coordinates};
        reconsider();
    }

    void on_info_stopped(const msg::InfoStopped& v) {
        s.known_unsnapped[v.id] = v.coordinates;
        if (s.role != Role::Snapped && s.role != Role::Hybrid) return;
        if (!s.tile || !geo::point_in_hex(v.coordinates, my_center(), *s.frame)) return;
        send(msg::IAYS{s.id, v.id});
        add_slave(v.id, v.coordinates, 0.0);
        reconsider();
    }

    void on_iays(const msg::IAYS& v) {
        if (s.role != Role::StoppedPending) return;
        cancel(TimerKind::Iays);
        auto it = s.known_snapped.find(v.id);
        HexFrame fr = s.oldest_frame_full.value_or(HexFrame{});
        Point center = it != s.known_snapped.end() ? it->second.center : s.position;
        become_slave_of(v.id, fr, center, true);
    }

    // ---- snap: SIP / claims -------------------------------------------------

    void on_sip(const msg::SIP& v) {
        if (s.role == Role::Hybrid) {
            // command from the older portion: hand the tile over first
            if (v.frame.same_portion(s.hybrid->old_frame) ||
                v.frame.older_than(s.hybrid->old_frame)) {
                if (s.hybrid->cmd) return;  // already committed
                s.hybrid->cmd = GoldCmdSip{v.target, v.frame, v.id};
                send(msg::AckSIP{s.id, v.id});
                start_succession();
            }
            return;
        }
        const bool engaged = s.snap_mission || s.push_mission || s.subst_mission;
        if (engaged) return;
        if (s.role == Role::Slave) {
            if (v.id != s.owner) return;
        } else if (s.role == Role::Free) {
            if (s.oldest_frame_seen && s.oldest_frame_seen->older_than(msg::frame_id_of(v.frame)))
                return;  // a strictly older portion is around; don't serve the newer one
        } else {
            return;
        }
        send(msg::AckSIP{s.id, v.id});
        s.role = Role::Free;
        s.owner = -1;
        SnapMission m;
        m.target = v.target;
        m.tile = geo::owning_axial(v.frame, v.target);
        m.frame = v.frame;
        m.issuer = v.id;
        s.snap_mission = m;
        eff.motion = claim_path(s.position, v.target, ctx.claim_distance());
    }

    void on_ack_sip(const msg::AckSIP& v) {
        if (s.role != Role::Snapped && s.role != Role::Hybrid) return;
        for (auto& [t, txn] : s.sip_txns) {
            if (txn.candidate != v.id || txn.acked) continue;
            txn.acked = true;
            cancel(TimerKind::AckSip, pack_tile(t));
            Point from = s.position;
            if (auto it = s.slaves.find(v.id); it != s.slaves.end()) from = it->second.pos;
            else if (auto ic = s.cands.find(v.id); ic != s.cands.end()) from = ic->second.pos;
            timer(TimerKind::IasWait,
                  now + ctx.ias_wait_timeout(geo::distance(from, txn.target)), pack_tile(t));
            drop_slave(v.id);
            s.cands.erase(v.id);
            return;
        }
    }

    void on_claim(const msg::ClaimPosition& v) {
        s.known_unsnapped.erase(v.id);
        if (!s.snap_mission || !near(v.coordinates, s.snap_mission->target)) return;
        SnapMission& m = *s.snap_mission;
        switch (m.stage) {
            case SnapMission::Stage::Travel:
                stop_and_wait();
                break;
            case SnapMission::Stage::Claiming: {
                const bool lose = v.timestamp < m.claim_ts ||
                                  (v.timestamp == m.claim_ts && v.id < s.id);
                if (lose) {
                    cancel(TimerKind::Claim);
                    m.stage = SnapMission::Stage::AwaitWinnerIas;
                }
                break;
            }
            default: break;  // already proceeding / waiting
        }
    }

    void on_taken(const msg::PositionTaken& v) {
        s.known_unsnapped.erase(v.id);
        if (!s.snap_mission || !near(v.coordinates, s.snap_mission->target)) return;
        SnapMission& m = *s.snap_mission;
        if (m.stage == SnapMission::Stage::Travel) {
            stop_and_wait();
        } else if (m.stage == SnapMission::Stage::Claiming) {
            // loser at the boundary: I am inside the winner's hexagon by construction
            cancel(TimerKind::Claim);
            become_slave_of(v.id, m.frame, v.coordinates, true);
        }
    }

    // ---- push ---------------------------------------------------------------

    void on_card(const msg::CardinalityInfo& v) {
        if (auto it = s.known_snapped.find(v.id); it != s.known_snapped.end())
            it->second.vcard = v.virtual_cardinality;
        if (auto it = s.nbrs.find(v.id); it != s.nbrs.end()) {
            it->second.vcard = v.virtual_cardinality;
            it->second.push_blocked = false;
        }
        reconsider();
    }

    void on_offer(const msg::Offer& v) {
        if (s.role != Role::Snapped && s.role != Role::Hybrid) return;
        int sender_ord = v.id;
        if (auto it = s.nbrs.find(v.id); it != s.nbrs.end())
            sender_ord = eff_nbr_ord(it->second, v.id, now);
        if (!moving_condition(v.virtual_cardinality, s.virtual_card, sender_ord,
                              s.effective_ord(now)))
            return;  // obsolete offer: no reply, sender times out
        send(msg::AckOffer{s.id, v.id});
        s.virtual_card += 1;
        s.card_announced = true;
        send(msg::CardinalityInfo{s.id, s.virtual_card});
        s.offers_in[v.transaction_id] = v.id;
        timer(TimerKind::PushTxnIn, now + ctx.push_txn_timeout(), v.transaction_id);
    }

    void on_ack_offer(const msg::AckOffer& v) {
        if (!s.offer_out || s.offer_out->target != v.id) return;
        const long txn = s.offer_out->txn;
        cancel(TimerKind::OfferWait, txn);
        s.offer_out.reset();
        auto nb = s.nbrs.find(v.id);
        if (nb == s.nbrs.end() || s.slaves.empty()) return;  // their timer will revert
        const Point dest = nb->second.center;
        int best = -1;
        double best_r = -std::numeric_limits<double>::infinity();
        for (const auto& [id, sl] : s.slaves) {
            const double r = sl.energy - ctx.e_motion * geo::distance(sl.pos, dest);
            if (r > best_r || (r == best_r && id < best)) {
                best = id;
                best_r = r;
            }
        }
        send(msg::MoveTo{s.id, best, dest, v.id, txn});
        drop_slave(best);
        reconsider();
    }

    void on_move_to(const msg::MoveTo& v) {
        if (s.role == Role::Hybrid) {
            auto it = s.known_snapped.find(v.id);
            if (it == s.known_snapped.end() || it->second.frame.same(fid_of(s))) return;
            if (s.hybrid->cmd) return;
            s.hybrid->cmd = GoldCmdMove{v.destination, v.destination_snapped_id,
                                        v.transaction_id};
            start_succession();
            return;
        }
        if (s.role != Role::Slave || v.id != s.owner) return;
        if (s.snap_mission || s.push_mission || s.subst_mission || !s.frame) return;
        const HexFrame fr = *s.frame;
        s.role = Role::Free;
        s.owner = -1;
        PushMission m;
        m.dest = v.destination;
        m.dest_tile = geo::owning_axial(fr, v.destination);
        m.dest_id = v.destination_snapped_id;
        m.txn = v.transaction_id;
        m.frame = fr;
        s.push_mission = m;
        eff.motion = push_path(s.position, v.destination, fr);
    }

    void on_arrived(const msg::InfoArrived& v) {
        if (s.role != Role::Snapped && s.role != Role::Hybrid) return;
        if (s.offers_in.erase(v.transaction_id)) {
            cancel(TimerKind::PushTxnIn, v.transaction_id);
            s.slaves[v.id] = {s.tile ? my_center() : s.position, v.energy_level};
            s.cands.erase(v.id);
        } else {
            // its transaction already timed out; count it back in
            add_slave(v.id, s.tile ? my_center() : s.position, v.energy_level);
        }
        s.known_unsnapped[v.id] = s.slaves[v.id].pos;
        reconsider();
    }

    // ---- pull ---------------------------------------------------------------

    void on_hole(const msg::HoleInfo& v) {
        if (s.role != Role::Snapped) return;  // hybrids freeze their pull participation
        if (!same_frame(v.frame) || v.hop_counter < 0) return;
        if (auto it = s.nbrs.find(v.id); it != s.nbrs.end()) {
            it->second.ord = v.order_value;
            it->second.ord_expires = now + v.timeout;
            it->second.push_blocked = false;
        }
        const Axial ht = geo::owning_axial(*s.frame, v.hole);
        if (ht == *s.tile) return;
        if (!s.slaves.empty()) {
            reconsider(ht);  // push a slave toward the hole instead of adopting
            return;
        }
        const int new_ord = v.order_value + 1;
        auto it = std::find_if(s.triggers.begin(), s.triggers.end(),
                               [&](const TriggerRecord& t) { return t.hole_tile == ht; });
        const bool accept =
            it == s.triggers.end() || new_ord < it->adopted_ord ||
            (new_ord == it->adopted_ord && v.hop_counter > it->horizon);
        if (!accept) return;
        TriggerRecord rec{v.hole, ht, new_ord, v.hop_counter, now + v.timeout,
                          geo::tile_distance(*s.tile, ht), false};
        if (it != s.triggers.end())
            *it = rec;
        else
            s.triggers.push_back(rec);
        std::stable_sort(s.triggers.begin(), s.triggers.end(),
                         [](const TriggerRecord& a, const TriggerRecord& b) {
                             if (a.distance != b.distance) return a.distance < b.distance;
                             return a.hole_tile < b.hole_tile;
                         });
        timer(TimerKind::TriggerExpiry, rec.deadline, pack_tile(ht));
        if (v.hop_counter > 0)
            send(msg::HoleInfo{s.id, v.hop_counter - 1, new_ord, v.hole, v.timeout,
                               fid_of(s)});
        reconsider();
    }

    // ---- role exchange ------------------------------------------------------

    void on_subst(const msg::Subst& v) {
        if (s.role != Role::Snapped || s.subst_in || !s.discovered) return;
        if (v.energy_level <= s.energy + ctx.delta_sub) return;
        send(msg::AckSubst{s.id, v.id});
        s.subst_in = PendingSubstIn{v.id, v.transaction_id, v.destination,
                                    v.destination_snapped_id};
        timer(TimerKind::SubstHold, now + ctx.subst_hold_timeout(), v.transaction_id);
    }

    void on_ack_subst(const msg::AckSubst& v) {
        if (!s.push_mission) return;
        PushMission& m = *s.push_mission;
        if (m.stage != PushMission::Stage::Travel || !m.subst_txn || m.subst_target != v.id)
            return;
        cancel(TimerKind::SubstWait, *m.subst_txn);
        auto it = s.known_snapped.find(v.id);
        if (it == s.known_snapped.end()) return;
        m.stage = PushMission::Stage::Divert;
        eff.motion = {{it->second.center, CheckTag::ReachSubstPos, {}}};
    }

    void on_subst_arrival(const msg::SubstArrival& v) {
        if (s.subst_in && s.subst_in->traveler == v.id) {
            send(msg::ProfilePacket{s.id, v.id, build_profile()});
            cancel(TimerKind::SubstHold, s.subst_in->txn);
            const PendingSubstIn pend = *s.subst_in;
            const HexFrame fr = *s.frame;
            clear_snapped();
            s.subst_in.reset();
            s.role = Role::Free;
            s.owner = -1;
            PushMission m;
            m.dest = pend.dest;
            m.dest_tile = geo::owning_axial(fr, pend.dest);
            m.dest_id = pend.dest_id;
            m.txn = pend.txn;
            m.frame = fr;
            s.push_mission = m;
            eff.motion = push_path(s.position, pend.dest, fr);
            return;
        }
        if (s.role == Role::Hybrid && s.hybrid->succession_slave == v.id) {
            cancel(TimerKind::Succession);
            const std::optional<GoldCmd> cmd = s.hybrid->cmd;
            const HexFrame old = s.hybrid->old_frame;
            clear_snapped();
            s.hybrid.reset();
            s.role = Role::Free;
            s.frame.reset();
            s.owner = -1;
            if (cmd) execute_gold_cmd(*cmd, old);
        }
    }

    void on_profile(const msg::ProfilePacket& v) {
        if (!s.push_mission || s.push_mission->stage != PushMission::Stage::AwaitProfile)
            return;
        cancel(TimerKind::ProfileWait);
        s.push_mission.reset();
        adopt_profile(v.profile);
    }

    void on_move_to_subst(const msg::MoveToSubst& v) {
        if (s.role != Role::Slave || v.id != s.owner) return;
        if (s.snap_mission || s.push_mission || s.subst_mission) return;
        s.role = Role::Free;
        s.owner = -1;
        s.subst_mission = SubstMission{v.snap_position, v.profile, v.id};
        eff.motion = {{v.snap_position, CheckTag::ReachSubstPos, {}}};
    }

    void on_retirement(const msg::Retirement& v) {
        s.known_snapped.erase(v.id);
        if (s.role != Role::Snapped && s.role != Role::Hybrid) return;
        if (!s.frame || !s.tile) return;
        s.nbrs.erase(v.id);
        const Axial t = geo::owning_axial(*s.frame, v.hole);
        if (geo::tile_distance(t, *s.tile) == 1 &&
            geo::hex_intersects_polygon(*s.frame, t, *ctx.aoi) && near(
                v.hole, geo::axial_center(*s.frame, t)))
            s.vp.insert(t);
        reconsider();
    }

    void start_succession() {
        int best = -1;
        double best_e = -1.0;
        for (const auto& [id, sl] : s.slaves) {
            if (s.hybrid->succession_tried.count(id)) continue;
            if (sl.energy > best_e || (sl.energy == best_e && id < best)) {
                best = id;
                best_e = sl.energy;
            }
        }
        if (best < 0) {
            retire_hybrid();
            return;
        }
        s.hybrid->succession_slave = best;
        const Point center = my_center();
        send(msg::MoveToSubst{s.id, best, build_profile(best), center});
        const double dist = geo::distance(s.slaves[best].pos, center);
        timer(TimerKind::Succession, now + dist / ctx.speed + 4.0 * ctx.t_msg);
    }

    // ---- timers -------------------------------------------------------------

    void sip_retry(Axial t) {
        auto it = s.sip_txns.find(t);
        if (it == s.sip_txns.end()) return;
        SipTxn& txn = it->second;
        txn.tried.insert(txn.candidate);
        // unresponsive candidate: forget it until it advertises itself again
        s.cands.erase(txn.candidate);
        drop_slave(txn.candidate);
        std::set<int> engaged;
        for (const auto& [ot, otxn] : s.sip_txns)
            if (!(ot == t)) engaged.insert(otxn.candidate);
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        auto consider = [&](int id, Point pos) {
            if (txn.tried.count(id) || engaged.count(id)) return;
            const double d = geo::distance(pos, txn.target);
            if (d < best_d || (d == best_d && id < best)) {
                best = id;
                best_d = d;
            }
        };
        for (const auto& [id, sl] : s.slaves) consider(id, sl.pos);
        for (const auto& [id, c] : s.cands) consider(id, c.pos);
        if (best < 0) {
            cancel(TimerKind::AckSip, pack_tile(t));
            cancel(TimerKind::IasWait, pack_tile(t));
            s.sip_txns.erase(it);
            reconsider();
            return;
        }
        txn.candidate = best;
        txn.acked = false;
        send(msg::SIP{s.id, best, txn.target, *s.frame});
        timer(TimerKind::AckSip, now + ctx.ack_sip_timeout(), pack_tile(t));
    }

    void on_timer(const TimerKey& k) {
        switch (k.kind) {
            case TimerKind::Discovery:
                if (s.role == Role::Snapped || s.role == Role::Hybrid) {
                    s.discovered = true;
                    reconsider();
                }
                break;
            case TimerKind::AckSip:
            case TimerKind::IasWait:
                sip_retry({static_cast<int>(k.key >> 32),
                           static_cast<int>(static_cast<std::uint32_t>(k.key))});
                break;
            case TimerKind::Claim:
                if (s.snap_mission &&
                    s.snap_mission->stage == SnapMission::Stage::Claiming) {
                    SnapMission& m = *s.snap_mission;
                    m.stage = SnapMission::Stage::Proceeding;
                    send(msg::PositionTaken{s.id, m.target});
                    s.role = Role::Snapped;
                    s.frame = m.frame;
                    s.tile = m.tile;
                    eff.motion = {{m.target, CheckTag::ReachCenter, m.tile}};
                }
                break;
            case TimerKind::Iays:
                if (s.role == Role::StoppedPending) {
                    s.role = Role::Free;
                    send(msg::InfoFree{s.id, s.position});
                }
                break;
            case TimerKind::OfferWait:
                if (s.offer_out && s.offer_out->txn == k.key) {
                    if (auto it = s.nbrs.find(s.offer_out->target); it != s.nbrs.end())
                        it->second.push_blocked = true;
                    s.offer_out.reset();
                    reconsider();
                }
                break;
            case TimerKind::PushTxnIn:
                if (s.offers_in.erase(k.key)) {
                    s.virtual_card -= 1;
                    announce_card();
                    reconsider();
                }
                break;
            case TimerKind::SubstWait:
                if (s.push_mission && s.push_mission->subst_txn == k.key)
                    s.push_mission->subst_txn.reset();
                break;
            case TimerKind::SubstHold:
                if (s.subst_in && s.subst_in->txn == k.key) s.subst_in.reset();
                break;
            case TimerKind::ProfileWait:
                if (s.push_mission &&
                    s.push_mission->stage == PushMission::Stage::AwaitProfile) {
                    s.push_mission->stage = PushMission::Stage::Travel;
                    eff.motion = push_path(s.position, s.push_mission->dest,
                                           s.push_mission->frame);
                }
                break;
            case TimerKind::PullRetry:
                if (s.pull) {
                    if (!s.vp.count(s.pull->hole_tile) || !s.slaves.empty() ||
                        !s.cands.empty() || !pull_evidence()) {
                        cancel_pull();
                        reconsider();
                        break;
                    }
                    s.pull->h += 1;
                    const double tout = ctx.pull_timeout(s.pull->h);
                    for (TriggerRecord& t : s.triggers)
                        if (t.self_origin) t.deadline = now + tout;
                    send(msg::HoleInfo{s.id, s.pull->h, 0, s.pull->hole, tout, fid_of(s)});
                    timer(TimerKind::PullRetry, now + tout);
                }
                break;
            case TimerKind::TriggerExpiry: {
                const Axial ht{static_cast<int>(k.key >> 32),
                               static_cast<int>(static_cast<std::uint32_t>(k.key))};
                const std::size_t before = s.triggers.size();
                std::erase_if(s.triggers, [&](const TriggerRecord& t) {
                    return !t.self_origin && t.hole_tile == ht && t.deadline <= now + 1e-9;
                });
                if (s.triggers.size() != before) reconsider();
                break;
            }
            case TimerKind::Succession:
                if (s.role == Role::Hybrid && s.hybrid->succession_slave) {
                    s.hybrid->succession_tried.insert(*s.hybrid->succession_slave);
                    s.hybrid->succession_slave.reset();
                    start_succession();
                }
                break;
        }
    }

    // ---- checkpoints --------------------------------------------------------

    void on_checkpoint(const CheckpointIn& c) {
        switch (c.tag) {
            case CheckTag::ReachClaimPoint:
                if (s.snap_mission &&
                    s.snap_mission->stage == SnapMission::Stage::Travel) {
                    SnapMission& m = *s.snap_mission;
                    m.stage = SnapMission::Stage::Claiming;
                    m.claim_ts = now;
                    send(msg::ClaimPosition{s.id, m.target, now});
                    timer(TimerKind::Claim, now + ctx.claim_timeout());
                }
                break;
            case CheckTag::ReachCenter:
                if (s.snap_mission &&
                    s.snap_mission->stage == SnapMission::Stage::Proceeding) {
                    const SnapMission m = *s.snap_mission;
                    s.snap_mission.reset();
                    become_snapped(m.frame, m.tile);
                }
                break;
            case CheckTag::EnterTile:
                if (s.push_mission &&
                    s.push_mission->stage == PushMission::Stage::Travel)
                    propose_subst(c.tile);
                break;
            case CheckTag::EnterDestTile:
                if (s.push_mission) finish_push();
                break;
            case CheckTag::ReachSubstPos:
                if (s.subst_mission) {
                    const SubstMission m = *s.subst_mission;
                    s.subst_mission.reset();
                    send(msg::SubstArrival{s.id, m.from});
                    adopt_profile(m.profile);
                } else if (s.push_mission &&
                           s.push_mission->stage == PushMission::Stage::Divert) {
                    s.push_mission->stage = PushMission::Stage::AwaitProfile;
                    send(msg::SubstArrival{s.id, s.push_mission->subst_target});
                    timer(TimerKind::ProfileWait, now + 4.0 * ctx.t_msg);
                }
                break;
        }
    }

    void propose_subst(Axial tile) {
        PushMission& m = *s.push_mission;
        if (m.subst_txn || m.proposed.count(tile)) return;
        const Point c = geo::axial_center(m.frame, tile);
        const FrameId fid = msg::frame_id_of(m.frame);
        for (const auto& [id, ks] : s.known_snapped) {
            if (id == m.dest_id || !ks.frame.same(fid) || !near(ks.center, c)) continue;
            const long txn = s.fresh_txn();
            m.proposed.insert(tile);
            m.subst_txn = txn;
            m.subst_target = id;
            send(msg::Subst{s.id, id, s.energy, m.dest, m.dest_id, txn});
            timer(TimerKind::SubstWait, now + ctx.subst_timeout(), txn);
            return;
        }
        m.proposed.insert(tile);
    }

    void finish_push() {
        const PushMission m = *s.push_mission;
        if (m.subst_txn) cancel(TimerKind::SubstWait, *m.subst_txn);
        s.push_mission.reset();
        send(msg::InfoArrived{s.id, m.dest_id, m.txn, s.energy});
        s.role = Role::Slave;
        s.owner = m.dest_id;
        s.frame = m.frame;
        s.tile = m.dest_tile;
    }

    // ---- starter ------------------------------------------------------------

    void on_starter(const StarterIn& st) {
        if (s.role != Role::Free || s.received_any || s.snap_mission || s.push_mission)
            return;
        HexFrame fr;
        fr.origin = s.position;
        fr.theta = geo::normalize_theta(st.theta);
        fr.side = ctx.r_s;
        fr.starter_ts = now;
        fr.starter_id = s.id;
        become_snapped(fr, Axial{0, 0});
    }

    // ---- dispatch -----------------------------------------------------------

    void on_msg(const Message& m) {
        s.received_any = true;
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, msg::IAS>) on_ias(v);
                else if constexpr (std::is_same_v<T, msg::InfoSnapped>) on_info_snapped(v);
                else if constexpr (std::is_same_v<T, msg::InfoSlave>) on_info_slave(v);
                else if constexpr (std::is_same_v<T, msg::InfoFree>) on_info_free(v);
                else if constexpr (std::is_same_v<T, msg::SIP>) on_sip(v);
                else if constexpr (std::is_same_v<T, msg::AckSIP>) on_ack_sip(v);
                else if constexpr (std::is_same_v<T, msg::ClaimPosition>) on_claim(v);
                else if constexpr (std::is_same_v<T, msg::PositionTaken>) on_taken(v);
                else if constexpr (std::is_same_v<T, msg::InfoStopped>) on_info_stopped(v);
                else if constexpr (std::is_same_v<T, msg::IAYS>) on_iays(v);
                else if constexpr (std::is_same_v<T, msg::CardinalityInfo>) on_card(v);
                else if constexpr (std::is_same_v<T, msg::Offer>) on_offer(v);
                else if constexpr (std::is_same_v<T, msg::AckOffer>) on_ack_offer(v);
                else if constexpr (std::is_same_v<T, msg::MoveTo>) on_move_to(v);
                else if constexpr (std::is_same_v<T, msg::InfoArrived>) on_arrived(v);
                else if constexpr (std::is_same_v<T, msg::HoleInfo>) on_hole(v);
                else if constexpr (std::is_same_v<T, msg::Subst>) on_subst(v);
                else if constexpr (std::is_same_v<T, msg::AckSubst>) on_ack_subst(v);
                else if constexpr (std::is_same_v<T, msg::SubstArrival>) on_subst_arrival(v);
                else if constexpr (std::is_same_v<T, msg::ProfilePacket>) on_profile(v);
                else if constexpr (std::is_same_v<T, msg::MoveToSubst>) on_move_to_subst(v);
                else if constexpr (std::is_same_v<T, msg::Retirement>) on_retirement(v);
            },
            m);
    }
};

}  // namespace

Effects step(SensorState& s, const Input& in, double now, const Context& ctx) {
    Stepper st{s, now, ctx, {}};
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, MsgIn>) st.on_msg(v.m);
            else if constexpr (std::is_same_v<T, TimerIn>) st.on_timer(v.k);
            else if constexpr (std::is_same_v<T, CheckpointIn>) st.on_checkpoint(v);
            else if constexpr (std::is_same_v<T, StarterIn>) st.on_starter(v);
        },
        in);
#ifdef PNP_VCARD_CHECK
    if ((s.role == Role::Snapped || s.role == Role::Hybrid) &&
        s.virtual_card != static_cast<int>(s.slaves.size() + s.offers_in.size()))
        std::fprintf(stderr, "VCARD id=%d t=%.6f in=%zu vcard=%d slaves=%zu offers=%zu\n",
                     s.id, now, in.index(), s.virtual_card, s.slaves.size(),
                     s.offers_in.size());
#endif
    return std::move(st.eff);
}

std::string debug_dump(const SensorState& s) {
    std::ostringstream os;
    os.precision(12);
    os << "id=" << s.id << " role=" << role_name(s.role) << " pos=" << s.position.x << ','
       << s.position.y << " e=" << s.energy << " owner=" << s.owner
       << " vcard=" << s.virtual_card << " ord=" << s.base_ord;
    if (s.frame)
        os << " frame=" << s.frame->starter_ts << ':' << s.frame->starter_id << '@'
           << s.frame->origin.x << ',' << s.frame->origin.y << '/' << s.frame->theta;
    if (s.tile) os << " tile=" << s.tile->q << ',' << s.tile->r;
    os << " slaves=";
    for (const auto& [id, sl] : s.slaves) os << id << ':' << sl.pos.x << ',' << sl.pos.y << ';';
    os << " cands=";
    for (const auto& [id, c] : s.cands) os << id << ';';
    os << " nbrs=";
    for (const auto& [id, nb] : s.nbrs)
        os << id << ':' << nb.tile.q << ',' << nb.tile.r << ",vc" << nb.vcard << ",o" << nb.ord
           << (nb.push_blocked ? ",b" : "") << ';';
    os << " vp=";
    for (Axial t : s.vp) os << t.q << ',' << t.r << ';';
    os << " sip=";
    for (const auto& [t, txn] : s.sip_txns)
        os << t.q << ',' << t.r << "->" << txn.candidate << (txn.acked ? "!" : "?") << ';';
    os << " trig=";
    for (const auto& t : s.triggers)
        os << t.hole_tile.q << ',' << t.hole_tile.r << ":o" << t.adopted_ord << ",h"
           << t.horizon << (t.self_origin ? ",self" : "") << ';';
    if (s.offer_out) os << " offer_out=" << s.offer_out->target << '/' << s.offer_out->txn;
    os << " offers_in=";
    for (const auto& [txn, from] : s.offers_in) os << txn << ':' << from << ';';
    if (s.pull) os << " pull=" << s.pull->hole_tile.q << ',' << s.pull->hole_tile.r
                   << ",h" << s.pull->h;
    if (s.snap_mission)
        os << " snapm=" << s.snap_mission->target.x << ',' << s.snap_mission->target.y << ",st"
           << static_cast<int>(s.snap_mission->stage);
    if (s.push_mission)
        os << " pushm=" << s.push_mission->dest_id << ",st"
           << static_cast<int>(s.push_mission->stage);
    if (s.subst_mission) os << " substm=" << s.subst_mission->from;
    if (s.hybrid)
        os << " hybrid=" << s.hybrid->old_frame.starter_ts << ':'
           << s.hybrid->old_frame.starter_id << (s.hybrid->cmd ? ",cmd" : "");
    os << " disc=" << s.discovered << " ca=" << s.card_announced << " rx=" << s.received_any
       << " known_un=";
    for (const auto& [id, p] : s.known_unsnapped) os << id << ';';
    os << " known_sn=";
    for (const auto& [id, ks] : s.known_snapped)
        os << id << (ks.vcard ? ":" + std::to_string(*ks.vcard) : "") << ';';
    return os.str();
}

}  // namespace pnp::proto
