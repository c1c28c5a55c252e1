#pragma once

#include <string>
#include <vector>

#include "gait_playback.hpp"

namespace footsim {

// Provenance written as '#' comment lines at the top of every log file.
struct LogHeader {
  std::string config_hash;
  std::vector<std::string> lines;  // extra "key value" lines
};

// Comment lines for a header, without the leading '#'.
std::vector<std::string> header_lines(const LogHeader& header);
// "truncated at step N of M" or "aborted at step N: message"; empty for a complete run.
std::string completion_marker(const PlaybackLog& log);

// time,side,vertex,x,y,z,f_normal,f_tx,f_ty,penetration
std::string contacts_to_csv(const std::vector<ContactRecord>& log, const LogHeader& header, const std::string& footer = {});
std::vector<ContactRecord> parse_contacts(const std::string& text, const std::string& source = "contacts.csv");

// time,px,py,pz,qw,qx,qy,qz,u_0..u_{n-1},udot_0..udot_{n-1}, one column per mesh vertex.
std::string flex_to_csv(const std::vector<FlexFrame>& frames, std::size_t vertices, const LogHeader& header,
                        const std::string& footer = {});
std::vector<FlexFrame> parse_flex(const std::string& text, const std::string& source = "flex.csv");

// time,offset,offset_rate,pelvis_height,pelvis_vx,pelvis_vy,pelvis_vz,trunk_tilt,grf_z,
// then <body>_{cx,cy,cz,vx,vy,vz,wx,wy,wz} per skeleton body.
std::string body_to_csv(const SkeletonModel& model, const std::vector<BodyFrame>& frames, const LogHeader& header,
                        const std::string& footer = {});
std::vector<BodyFrame> parse_body(const SkeletonModel& model, const std::string& text,
                                  const std::string& source = "body.csv");

// time,r_q,r_qdot,r_act,r_vel,r_healthy,total
std::string rewards_to_csv(const std::vector<RewardBreakdown>& rewards, const LogHeader& header,
                           const std::string& footer = {});
std::vector<RewardBreakdown> parse_rewards(const std::string& text, const std::string& source = "rewards.csv");

// Run metadata as pretty-printed JSON.
std::string meta_to_json(const PlaybackLog& log, const LogHeader& header);

// Directory layout of one simulated model:
//   meta.json, contacts.csv, body.csv, rewards.csv, flex_right.csv, flex_left.csv (deformable only)
void save_playback_log(const std::string& dir, const SkeletonModel& model, const FootPair& feet,
                       const PlaybackLog& log, const LogHeader& header);

struct LoadedLog {
  PlaybackLog log;
  std::string config_hash;  // hash recorded by the simulation
};
LoadedLog load_playback_log(const std::string& dir, const SkeletonModel& model);

}  // namespace footsim
