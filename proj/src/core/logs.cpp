#include "logs.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "error.hpp"
#include "text.hpp"

namespace footsim {

namespace {

using Row = std::vector<std::string_view>;

void add(std::string& out, double v) {
  out += ',';
  out += text::fmt(v);
}

std::string begin(const LogHeader& header, const std::string& columns) {
  std::string out;
  for (const auto& l : header_lines(header)) out += "#" + l + "\n";
  out += columns + "\n";
  return out;
}

void finish(std::string& out, const std::string& footer) {
  if (!footer.empty()) out += "# " + footer + "\n";
}

// Rows of a CSV whose first non-comment line must equal `columns`.
class CsvReader {
 public:
  CsvReader(const std::string& text, const std::string& source, const std::string& columns)
      : reader_(text, source), source_(source) {
    std::string_view line;
    if (!reader_.next(line)) throw ParseError(source, reader_.line_number(), "missing header");
    if (text::trim(line) != columns) throw ParseError(source, reader_.line_number(), "unexpected header");
    width_ = text::split(columns, ',').size();
  }
  CsvReader(const std::string& text, const std::string& source, std::vector<std::string_view>* header)
      : reader_(text, source), source_(source) {
    std::string_view line;
    if (!reader_.next(line)) throw ParseError(source, reader_.line_number(), "missing header");
    header_text_ = std::string(text::trim(line));
    *header = text::split(header_text_, ',');
    width_ = header->size();
  }

  bool next(Row& row) {
    std::string_view line;
    if (!reader_.next(line)) return false;
    row = text::split(line, ',');
    if (row.size() != width_)
      throw ParseError(source_, reader_.line_number(),
                       "expected " + std::to_string(width_) + " fields, got " + std::to_string(row.size()));
    return true;
  }
  double num(const Row& row, std::size_t i) const {
    double v = text::parse_double(text::trim(row[i]), source_, reader_.line_number());
    if (!std::isfinite(v)) throw ParseError(source_, reader_.line_number(), "non-finite value");
    return v;
  }
  [[noreturn]] void error(const std::string& what) const { throw ParseError(source_, reader_.line_number(), what); }

 private:
  text::LineReader reader_;
  std::string source_;
  std::string header_text_;
  std::size_t width_ = 0;
};

const std::string kContactColumns = "time,side,vertex,x,y,z,f_normal,f_tx,f_ty,penetration";
const std::string kRewardColumns = "time,r_q,r_qdot,r_act,r_vel,r_healthy,total";
const char* kBodyFixed[] = {"time", "offset", "offset_rate", "pelvis_height", "pelvis_vx",
                            "pelvis_vy", "pelvis_vz", "trunk_tilt", "grf_z"};
const char* kSegmentFields[] = {"cx", "cy", "cz", "vx", "vy", "vz", "wx", "wy", "wz"};

std::string body_columns(const SkeletonModel& model) {
  std::string out;
  for (const char* c : kBodyFixed) out += out.empty() ? std::string(c) : std::string(",") + c;
  for (const auto& b : model.bodies)
    for (const char* f : kSegmentFields) out += "," + b.name + "_" + f;
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace

std::vector<std::string> header_lines(const LogHeader& header) {
  std::vector<std::string> out{" config_hash " + header.config_hash};
  for (const auto& l : header.lines) out.push_back(" " + l);
  return out;
}

std::string completion_marker(const PlaybackLog& log) {
  if (!log.failure.empty())
    return "aborted at step " + std::to_string(log.failed_step) + ": " + log.failure;
  if (log.truncated)
    return "truncated at step " + std::to_string(log.steps_completed) + " of " + std::to_string(log.steps_planned);
  return {};
}

std::string contacts_to_csv(const std::vector<ContactRecord>& log, const LogHeader& header, const std::string& footer) {
  std::string out = begin(header, kContactColumns);
  out.reserve(out.size() + log.size() * 120);
  for (const auto& c : log) {
    out += text::fmt(c.time);
    out += ',';
    out += side_name(c.side);
    out += ',';
    out += std::to_string(c.vertex);
    add(out, c.position.x());
    add(out, c.position.y());
    add(out, c.position.z());
    add(out, c.normal);
    add(out, c.tangential.x());
    add(out, c.tangential.y());
    add(out, c.penetration);
    out += '\n';
  }
  finish(out, footer);
  return out;
}

std::vector<ContactRecord> parse_contacts(const std::string& text, const std::string& source) {
  CsvReader csv(text, source, kContactColumns);
  std::vector<ContactRecord> out;
  Row r;
  while (csv.next(r)) {
    ContactRecord c;
    c.time = csv.num(r, 0);
    try {
      c.side = parse_side(std::string(text::trim(r[1])));
    } catch (const Error&) {
      csv.error("bad side '" + std::string(r[1]) + "'");
    }
    double v = csv.num(r, 2);
    if (v < 0 || v != std::floor(v)) csv.error("bad vertex index");
    c.vertex = static_cast<int>(v);
    c.position = Vec3(csv.num(r, 3), csv.num(r, 4), csv.num(r, 5));
    c.normal = csv.num(r, 6);
    c.tangential = Vec3(csv.num(r, 7), csv.num(r, 8), 0.0);
    c.penetration = csv.num(r, 9);
    out.push_back(c);
  }
  return out;
}

std::string flex_to_csv(const std::vector<FlexFrame>& frames, std::size_t vertices, const LogHeader& header,
                        const std::string& footer) {
  std::string cols = "time,px,py,pz,qw,qx,qy,qz";
  for (std::size_t i = 0; i < vertices; ++i) cols += ",u_" + std::to_string(i);
  for (std::size_t i = 0; i < vertices; ++i) cols += ",udot_" + std::to_string(i);
  std::string out = begin(header, cols);
  for (const auto& f : frames) {
    require(f.u.size() == vertices && f.udot.size() == vertices, "flex frame size does not match the mesh");
    out += text::fmt(f.time);
    add(out, f.pose.position.x());
    add(out, f.pose.position.y());
    add(out, f.pose.position.z());
    add(out, f.pose.orientation.w());
    add(out, f.pose.orientation.x());
    add(out, f.pose.orientation.y());
    add(out, f.pose.orientation.z());
    for (double u : f.u) add(out, u);
    for (double u : f.udot) add(out, u);
    out += '\n';
  }
  finish(out, footer);
  return out;
}

std::vector<FlexFrame> parse_flex(const std::string& text, const std::string& source) {
  std::vector<std::string_view> header;
  CsvReader csv(text, source, &header);
  if (header.size() < 8 || (header.size() - 8) % 2 != 0) throw ParseError(source, 1, "unexpected flex header");
  const std::size_t n = (header.size() - 8) / 2;
  std::vector<FlexFrame> out;
  Row r;
  while (csv.next(r)) {
    FlexFrame f;
    f.time = csv.num(r, 0);
    f.pose.position = Vec3(csv.num(r, 1), csv.num(r, 2), csv.num(r, 3));
    f.pose.orientation = Quat(csv.num(r, 4), csv.num(r, 5), csv.num(r, 6), csv.num(r, 7));
    f.u.resize(n);
    f.udot.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      f.u[i] = csv.num(r, 8 + i);
      f.udot[i] = csv.num(r, 8 + n + i);
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::string body_to_csv(const SkeletonModel& model, const std::vector<BodyFrame>& frames, const LogHeader& header,
                        const std::string& footer) {
  std::string out = begin(header, body_columns(model));
  for (const auto& b : frames) {
    require(b.segments.size() == model.bodies.size(), "body frame segment count does not match the skeleton");
    out += text::fmt(b.time);
    add(out, b.offset);
    add(out, b.offset_rate);
    add(out, b.pelvis_height);
    add(out, b.pelvis_velocity.x());
    add(out, b.pelvis_velocity.y());
    add(out, b.pelvis_velocity.z());
    add(out, b.trunk_tilt);
    add(out, b.grf_z);
    for (const auto& s : b.segments) {
      for (int k = 0; k < 3; ++k) add(out, s.com[k]);
      for (int k = 0; k < 3; ++k) add(out, s.velocity[k]);
      for (int k = 0; k < 3; ++k) add(out, s.omega_body[k]);
    }
    out += '\n';
  }
  finish(out, footer);
  return out;
}

std::vector<BodyFrame> parse_body(const SkeletonModel& model, const std::string& text, const std::string& source) {
  CsvReader csv(text, source, body_columns(model));
  std::vector<BodyFrame> out;
  Row r;
  while (csv.next(r)) {
    BodyFrame b;
    b.time = csv.num(r, 0);
    b.offset = csv.num(r, 1);
    b.offset_rate = csv.num(r, 2);
    b.pelvis_height = csv.num(r, 3);
    b.pelvis_velocity = Vec3(csv.num(r, 4), csv.num(r, 5), csv.num(r, 6));
    b.trunk_tilt = csv.num(r, 7);
    b.grf_z = csv.num(r, 8);
    std::size_t c = 9;
    b.segments.resize(model.bodies.size());
    for (auto& s : b.segments) {
      s.com = Vec3(csv.num(r, c), csv.num(r, c + 1), csv.num(r, c + 2));
      s.velocity = Vec3(csv.num(r, c + 3), csv.num(r, c + 4), csv.num(r, c + 5));
      s.omega_body = Vec3(csv.num(r, c + 6), csv.num(r, c + 7), csv.num(r, c + 8));
      c += 9;
    }
    out.push_back(std::move(b));
  }
  return out;
}

std::string rewards_to_csv(const std::vector<RewardBreakdown>& rewards, const LogHeader& header,
                           const std::string& footer) {
  std::string out = begin(header, kRewardColumns);
  for (const auto& r : rewards) {
    out += text::fmt(r.time);
    add(out, r.r_q);
    add(out, r.r_qdot);
    add(out, r.r_act);
    add(out, r.r_vel);
    add(out, r.r_healthy);
    add(out, r.total);
    out += '\n';
  }
  finish(out, footer);
  return out;
}

std::vector<RewardBreakdown> parse_rewards(const std::string& text, const std::string& source) {
  CsvReader csv(text, source, kRewardColumns);
  std::vector<RewardBreakdown> out;
  Row r;
  while (csv.next(r))
    out.push_back({csv.num(r, 0), csv.num(r, 1), csv.num(r, 2), csv.num(r, 3), csv.num(r, 4), csv.num(r, 5),
                   csv.num(r, 6)});
  return out;
}

std::string meta_to_json(const PlaybackLog& log, const LogHeader& header) {
  nlohmann::ordered_json j;
  j["config_hash"] = header.config_hash;
  j["model"] = foot_model_name(log.model);
  j["sim_rate_hz"] = log.sim_rate;
  j["control_rate_hz"] = log.control_rate;
  j["steps_planned"] = log.steps_planned;
  j["steps_completed"] = log.steps_completed;
  j["truncated"] = log.truncated;
  j["failure"] = log.failure;
  j["failed_step"] = log.failed_step;
  j["marker"] = completion_marker(log);
  j["diagnostics"] = {{"capped_forces", log.diagnostics.capped}, {"degenerate_edges", log.diagnostics.degenerate}};
  j["provenance"] = header.lines;
  return j.dump(2) + "\n";
}

void save_playback_log(const std::string& dir, const SkeletonModel& model, const FootPair& feet,
                       const PlaybackLog& log, const LogHeader& header) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + dir + ": " + ec.message());
  const fs::path base(dir);
  const std::string footer = completion_marker(log);
  write_text(base / "contacts.csv", contacts_to_csv(log.contacts, header, footer));
  write_text(base / "body.csv", body_to_csv(model, log.body, header, footer));
  write_text(base / "rewards.csv", rewards_to_csv(log.rewards, header, footer));
  for (Side s : {Side::Right, Side::Left}) {
    const fs::path p = base / (std::string("flex_") + side_name(s) + ".csv");
    if (log.model == FootModel::Deformable)
      write_text(p, flex_to_csv(log.flex[static_cast<int>(s)], feet.mesh[static_cast<int>(s)].vertices.size(), header,
                                footer));
    else
      fs::remove(p, ec);
  }
  // Written last: its presence marks a finished write of the directory.
  write_text(base / "meta.json", meta_to_json(log, header));
}

LoadedLog load_playback_log(const std::string& dir, const SkeletonModel& model) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  const fs::path meta_path = base / "meta.json";
  if (!fs::exists(meta_path)) fail(ErrorKind::Io, "no meta.json in " + dir);
  LoadedLog out;
  PlaybackLog& log = out.log;
  try {
    auto j = nlohmann::json::parse(text::read_file(meta_path.string()));
    out.config_hash = j.at("config_hash").get<std::string>();
    log.model = parse_foot_model(j.at("model").get<std::string>());
    log.sim_rate = j.at("sim_rate_hz").get<double>();
    log.control_rate = j.at("control_rate_hz").get<double>();
    log.steps_planned = j.at("steps_planned").get<long>();
    log.steps_completed = j.at("steps_completed").get<long>();
    log.truncated = j.at("truncated").get<bool>();
    log.failure = j.at("failure").get<std::string>();
    log.failed_step = j.at("failed_step").get<long>();
    log.diagnostics.capped = j.at("diagnostics").at("capped_forces").get<long>();
    log.diagnostics.degenerate = j.at("diagnostics").at("degenerate_edges").get<long>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(meta_path.string(), 0, std::string("bad metadata: ") + e.what());
  }
  auto read = [&](const char* name) { return text::read_file((base / name).string()); };
  log.contacts = parse_contacts(read("contacts.csv"), (base / "contacts.csv").string());
  log.body = parse_body(model, read("body.csv"), (base / "body.csv").string());
  log.rewards = parse_rewards(read("rewards.csv"), (base / "rewards.csv").string());
  if (log.model == FootModel::Deformable) {
    for (Side s : {Side::Right, Side::Left}) {
      const std::string name = std::string("flex_") + side_name(s) + ".csv";
      log.flex[static_cast<int>(s)] = parse_flex(read(name.c_str()), (base / name).string());
    }
  }
  return out;
}

}  // namespace footsim
