#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pnp/geometry.hpp"

namespace pnp::msg {

using geo::Axial;
using geo::HexFrame;
using geo::Point;

/// Portion identity carried on messages that need merge discrimination.
struct FrameId {
    double starter_ts = 0.0;
    int starter_id = -1;
    bool valid() const { return starter_id >= 0; }
    bool same(const FrameId& o) const {
        return starter_ts == o.starter_ts && starter_id == o.starter_id;
    }
    bool older_than(const FrameId& o) const {
        if (starter_ts != o.starter_ts) return starter_ts < o.starter_ts;
        return starter_id < o.starter_id;
    }
};

inline FrameId frame_id_of(const HexFrame& f) { return {f.starter_ts, f.starter_id}; }

/// One hole trigger held in a snapped sensor's pre-emptive priority queue.
struct TriggerRecord {
    Point hole;
    Axial hole_tile;       // in the holder's frame
    int adopted_ord = 0;   // ord value adopted while the record is live
    int horizon = 0;       // highest hop counter seen for this hole
    double deadline = 0.0;
    int distance = 0;      // tiles from holder to hole
    bool self_origin = false;
};

/// Neighborhood profile transferred on a role exchange.
struct Profile {
    int base_ord = 0;
    HexFrame frame;
    Axial tile;
    std::vector<TriggerRecord> triggers;
    // id -> (center, virtual cardinality, ord, ord deadline)
    struct Neighbor {
        Point center;
        Axial tile;
        int virtual_card = 0;
        int ord = 0;
        double ord_expires = 0.0;
    };
    std::map<int, Neighbor> neighbors;
    std::map<int, std::pair<Point, double>> slaves;  // id -> (position, energy)
    std::vector<Axial> vacant;
    bool pull_evidence = false;
};

// Message variants, fields per Table 1. `id` is always the sender. Variants
// with a receiver id are unicast, all others broadcast.

struct IAS {
    int id;
    Point coordinates;
    double starter_timestamp;
    HexFrame frame;  // tiling portion (origin, theta, side, starter identity)
};
struct InfoSnapped {
    int id;
    Point coordinates;
    int virtual_cardinality;
    FrameId frame;
};
struct InfoSlave {
    int id;
    Point coordinates;
    double energy_level;
};
struct InfoFree {
    int id;
    Point coordinates;
};
struct SIP {
    int id;
    int receiver_id;
    Point target;
    HexFrame frame;
};
struct AckSIP {
    int id;
    int receiver_id;
};
struct ClaimPosition {
    int id;
    Point coordinates;  // the claimed position
    double timestamp;
};
struct PositionTaken {
    int id;
    Point coordinates;
};
struct InfoStopped {
    int id;
    Point coordinates;
};
struct IAYS {
    int id;
    int receiver_id;
};
struct CardinalityInfo {
    int id;
    int virtual_cardinality;
};
struct Offer {
    int id;
    int receiver_id;
    int virtual_cardinality;
    long transaction_id;
};
struct AckOffer {
    int id;
    int receiver_id;
};
struct MoveTo {
    int id;
    int receiver_id;
    Point destination;
    int destination_snapped_id;
    long transaction_id;
};
struct InfoArrived {
    int id;
    int receiver_id;
    long transaction_id;
    double energy_level;
};
struct HoleInfo {
    int id;
    int hop_counter;
    int order_value;
    Point hole;
    double timeout;
    FrameId frame;
};
struct Subst {
    int id;
    int receiver_id;
    double energy_level;
    Point destination;
    int destination_snapped_id;
    long transaction_id;
};
struct AckSubst {
    int id;
    int receiver_id;
};
struct SubstArrival {
    int id;
    int receiver_id;
};
struct ProfilePacket {
    int id;
    int receiver_id;
    Profile profile;
};
struct MoveToSubst {
    int id;
    int receiver_id;
    Profile profile;
    Point snap_position;
};
struct Retirement {
    int id;
    Point hole;  // the snap position being vacated
};

using Message = std::variant<IAS, InfoSnapped, InfoSlave, InfoFree, SIP, AckSIP, ClaimPosition,
                             PositionTaken, InfoStopped, IAYS, CardinalityInfo, Offer, AckOffer,
                             MoveTo, InfoArrived, HoleInfo, Subst, AckSubst, SubstArrival,
                             ProfilePacket, MoveToSubst, Retirement>;

int sender_of(const Message& m);
/// Receiver id for unicast variants, nullopt for broadcast.
std::optional<int> receiver_of(const Message& m);
const char* variant_name(const Message& m);
/// Table 1 payload as "name=value name=value ..." for the trace log.
std::string payload_text(const Message& m);

}  // namespace pnp::msg
