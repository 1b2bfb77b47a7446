#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "pnp/geometry.hpp"
#include "pnp/message.hpp"

namespace pnp::proto {

using geo::Axial;
using geo::HexFrame;
using geo::Point;
using geo::Polygon;
using msg::FrameId;
using msg::Message;
using msg::Profile;
using msg::TriggerRecord;

enum class Role { Free, Slave, Snapped, StoppedPending, Hybrid };
const char* role_name(Role r);

/// Shared read-only run parameters visible to every sensor.
struct Context {
    const Polygon* aoi = nullptr;
    double r_s = 5.0;
    double r_tx = 11.0;
    double speed = 1.0;
    double t_msg = 0.015;        // 99th-percentile one-hop delivery latency
    double delta_sub = 500.0;    // role-exchange hysteresis, joules
    double e_motion = 1.0;       // joules per meter, for residual-energy estimates

    double ack_sip_timeout() const { return 2.0 * t_msg; }
    double claim_timeout() const { return 4.0 * t_msg; }
    double iays_timeout() const { return 2.0 * t_msg; }
    double offer_timeout() const { return 4.0 * t_msg; }
    double discovery_window() const { return 3.0 * t_msg; }
    double subst_timeout() const { return 2.0 * t_msg; }
    double push_txn_timeout() const {
        return 2.0 * 1.7320508075688772 * r_s / speed + 4.0 * t_msg;
    }
    double subst_hold_timeout() const { return 2.0 * r_s / speed + 4.0 * t_msg; }
    double ias_wait_timeout(double dist) const {
        return dist / speed + claim_timeout() + 4.0 * t_msg;
    }
    double pull_timeout(int h) const { return (h + 1) * 2.0 * r_s / speed; }
    /// Stop-at distance for a sensor snapping into position.
    double claim_distance() const { return 1.7320508075688772 * r_s / 2.0; }
};

enum class TimerKind : std::uint8_t {
    Discovery,
    AckSip,        // key = packed tile
    IasWait,       // key = packed tile
    Claim,
    Iays,
    OfferWait,     // key = transaction id
    PushTxnIn,     // key = transaction id
    SubstWait,     // key = transaction id
    SubstHold,     // key = transaction id
    ProfileWait,
    PullRetry,
    TriggerExpiry, // key = packed hole tile
    Succession,
};

struct TimerKey {
    TimerKind kind;
    std::int64_t key = 0;
    auto operator<=>(const TimerKey&) const = default;
};

std::int64_t pack_tile(Axial a);

enum class CheckTag : std::uint8_t {
    ReachClaimPoint,
    ReachCenter,
    EnterTile,
    EnterDestTile,
    ReachSubstPos,
};

struct Checkpoint {
    Point point;
    CheckTag tag;
    Axial tile{};  // meaningful for EnterTile / EnterDestTile
};

/// What a handler asks the engine to do. Handlers are deterministic: the same
/// (state value, input, now) always produces the same effects and next state.
struct Effects {
    std::vector<Message> sends;
    std::optional<std::vector<Checkpoint>> motion;  // replaces any current plan
    bool stop_motion = false;
    std::vector<std::pair<TimerKey, double>> set_timers;  // (key, absolute deadline)
    std::vector<TimerKey> cancel_timers;
};

// ---- per-sensor state ------------------------------------------------------

struct SlaveInfo {
    Point pos;
    double energy = 0.0;
};
struct CandidateInfo {
    Point pos;
};
struct NeighborInfo {
    Point center;
    Axial tile;
    int vcard = 0;
    int ord = 0;               // trigger-altered order value, valid until ord_expires
    double ord_expires = -1.0; // before this instant use `ord`, after it the id
    bool push_blocked = false; // declined/unanswered offer; cleared on fresh info
};
struct KnownSnapped {
    Point center;
    FrameId frame;
    std::optional<int> vcard;  // last advertised virtual cardinality
};
struct SipTxn {
    Point target;
    int candidate = -1;
    bool acked = false;
    std::set<int> tried;
};
struct SnapMission {
    Point target;
    Axial tile;
    HexFrame frame;
    int issuer = -1;
    enum class Stage { Travel, Claiming, Proceeding, AwaitWinnerIas } stage = Stage::Travel;
    double claim_ts = 0.0;
};
struct PushMission {
    Point dest;
    Axial dest_tile;
    int dest_id = -1;
    long txn = 0;
    HexFrame frame;
    enum class Stage { Travel, Divert, AwaitProfile } stage = Stage::Travel;
    std::set<Axial> proposed;          // tiles already offered a role exchange
    std::optional<long> subst_txn;     // open Subst proposal
    int subst_target = -1;
};
struct SubstMission {  // MoveToSubst receiver
    Point snap_pos;
    Profile profile;
    int from = -1;
};
struct PendingSubstIn {  // snapped side of an accepted Subst
    int traveler = -1;
    long txn = 0;
    Point dest;
    int dest_id = -1;
};
struct OfferOut {
    int target = -1;
    long txn = 0;
};
struct GoldCmdSip {
    Point target;
    HexFrame frame;
    int issuer;
};
struct GoldCmdMove {
    Point dest;
    int dest_id;
    long txn;
};
using GoldCmd = std::variant<GoldCmdSip, GoldCmdMove>;
struct HybridState {
    HexFrame old_frame;
    std::optional<GoldCmd> cmd;
    std::optional<int> succession_slave;
    std::set<int> succession_tried;
};
struct PullState {
    Axial hole_tile;
    Point hole;
    int h = 0;
};

struct SensorState {
    int id = 0;
    Role role = Role::Free;
    Point position;
    double energy = 1e4;

    std::optional<HexFrame> frame;  // portion joined (snapped/hybrid/slave)
    std::optional<Axial> tile;
    int owner = -1;                 // owning snapped sensor, when slave

    // Snapped-sensor working set.
    int virtual_card = 0;
    int base_ord = 0;
    std::map<int, SlaveInfo> slaves;
    std::map<int, CandidateInfo> cands;      // free sensors in L(p)
    std::map<int, NeighborInfo> nbrs;        // adjacent snapped sensors
    std::set<Axial> vp;                      // vacant adjacent positions
    std::map<Axial, SipTxn> sip_txns;
    std::vector<TriggerRecord> triggers;     // pre-emptive queue, head = closest hole
    std::optional<OfferOut> offer_out;
    std::map<long, int> offers_in;           // txn -> offerer
    std::optional<PendingSubstIn> subst_in;
    std::optional<PullState> pull;
    bool discovered = false;                 // neighbor discovery window elapsed
    bool card_announced = false;

    // Traveling activities.
    std::optional<SnapMission> snap_mission;
    std::optional<PushMission> push_mission;
    std::optional<SubstMission> subst_mission;

    // Merge.
    std::optional<HybridState> hybrid;
    std::optional<FrameId> oldest_frame_seen;
    std::optional<HexFrame> oldest_frame_full;
    std::set<int> merge_reias;  // foreign snapped already answered with a re-discovery

    // Passive knowledge.
    std::map<int, KnownSnapped> known_snapped;
    std::map<int, Point> known_unsnapped;  // evidence that un-snapped sensors exist
    bool evidence_inherited = false;

    bool received_any = false;
    long txn_counter = 0;

    Point stop_point;  // where a case-1 stop happened

    long fresh_txn() { return static_cast<long>(id) * 1000000L + (++txn_counter); }
    int effective_ord(double now) const;
};

// ---- inputs ----------------------------------------------------------------

struct MsgIn {
    Message m;
};
struct TimerIn {
    TimerKey k;
};
struct CheckpointIn {
    CheckTag tag;
    Axial tile{};
};
struct StarterIn {
    double theta;  // orientation drawn by the engine's seeded stream
};
using Input = std::variant<MsgIn, TimerIn, CheckpointIn, StarterIn>;

/// Advance one sensor by one input. Mutates `s` in place and returns the
/// side effects for the engine to apply.
Effects step(SensorState& s, const Input& in, double now, const Context& ctx);

// ---- pure decision functions (unit-testable pieces of the state machine) ---

/// The Moving Condition governing slave transfer from p to q, on virtual
/// cardinalities: |S(p)| > |S(q)|+1, or equal+1 with ord(p) > ord(q).
bool moving_condition(int card_p, int card_q, int ord_p, int ord_q);

/// Serialize the full state for determinism/purity comparisons.
std::string debug_dump(const SensorState& s);

}  // namespace pnp::proto
