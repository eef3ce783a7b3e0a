// Copyright 2026 The s3mirror Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "s3mirror/durable/store.hpp"

#include "s3mirror/common/clock.hpp"
#include "sqlite.hpp"

namespace s3mirror::durable {

namespace {

constexpr const char* kSchema = R"SQL(
CREATE TABLE IF NOT EXISTS workflows (
  workflow_id  TEXT PRIMARY KEY,
  name         TEXT NOT NULL,
  input        TEXT NOT NULL,
  status       TEXT NOT NULL,
  output       TEXT,
  error        TEXT,
  parent_id    TEXT,
  queue_name   TEXT,
  executor_id  TEXT,
  heartbeat_at INTEGER,
  created_at   INTEGER NOT NULL,
  updated_at   INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS workflows_parent ON workflows(parent_id);
CREATE INDEX IF NOT EXISTS workflows_status ON workflows(status, queue_name);
CREATE TABLE IF NOT EXISTS steps (
  workflow_id     TEXT NOT NULL,
  step_seq        INTEGER NOT NULL,
  name            TEXT NOT NULL,
  status          TEXT NOT NULL,
  output_or_error TEXT,
  attempts        INTEGER NOT NULL DEFAULT 0,
  started_at      INTEGER,
  finished_at     INTEGER,
  PRIMARY KEY (workflow_id, step_seq)
);
CREATE TABLE IF NOT EXISTS queue (
  seq          INTEGER PRIMARY KEY AUTOINCREMENT,
  queue_name   TEXT NOT NULL,
  workflow_id  TEXT NOT NULL UNIQUE,
  claimed_by   TEXT,
  claimed_at   INTEGER,
  heartbeat_at INTEGER
);
CREATE INDEX IF NOT EXISTS queue_claim ON queue(queue_name, claimed_by, seq);
CREATE TABLE IF NOT EXISTS events (
  workflow_id TEXT NOT NULL,
  key         TEXT NOT NULL,
  value       TEXT NOT NULL,
  version     INTEGER NOT NULL,
  PRIMARY KEY (workflow_id, key)
);
)SQL";

constexpr const char* kWorkflowColumns =
    "workflow_id, name, input, status, output, error, parent_id, queue_name, executor_id, "
    "created_at, updated_at";

Uuid must_parse(const std::string& text) {
  auto id = Uuid::parse(text);
  if (!id) throw StoreFailure("corrupt uuid in store: " + text);
  return *id;
}

WorkflowRecord read_workflow(const sql::Stmt& st) {
  WorkflowRecord r;
  r.workflow_id = must_parse(st.text(0));
  r.name = st.text(1);
  r.input = Payload::parse(st.text(2));
  r.status = workflow_status_from(st.text(3));
  if (auto out = st.opt_text(4)) r.output = Payload::parse(*out);
  r.error = st.opt_text(5);
  if (auto p = st.opt_text(6)) r.parent_id = must_parse(*p);
  r.queue_name = st.opt_text(7);
  r.executor_id = st.opt_text(8);
  r.created_at = st.int64(9);
  r.updated_at = st.int64(10);
  return r;
}

std::optional<WorkflowRecord> select_workflow(const sql::Db& db, const Uuid& id) {
  std::string q = std::string("SELECT ") + kWorkflowColumns + " FROM workflows WHERE workflow_id=?";
  sql::Stmt st(db, q.c_str());
  st.bind(1, id.str());
  if (!st.step()) return std::nullopt;
  return read_workflow(st);
}

void insert_workflow_row(const sql::Db& db, const WorkflowRecord& r) {
  sql::Stmt st(db,
               "INSERT INTO workflows (workflow_id, name, input, status, parent_id, queue_name, "
               "executor_id, heartbeat_at, created_at, updated_at) VALUES (?,?,?,?,?,?,?,?,?,?)");
  st.bind(1, r.workflow_id.str())
      .bind(2, r.name)
      .bind(3, r.input.dump())
      .bind(4, to_string(r.status))
      .bind(5, r.parent_id ? std::optional<std::string>(r.parent_id->str()) : std::nullopt)
      .bind(6, r.queue_name)
      .bind(7, r.executor_id)
      .bind(8, r.executor_id ? std::optional<std::int64_t>(r.created_at) : std::nullopt)
      .bind(9, r.created_at)
      .bind(10, r.updated_at);
  st.run();
}

void insert_queue_row(const sql::Db& db, const std::string& queue_name, const Uuid& id) {
  sql::Stmt st(db, "INSERT INTO queue (queue_name, workflow_id) VALUES (?,?)");
  st.bind(1, queue_name).bind(2, id.str());
  st.run();
}

bool same_request(const WorkflowRecord& a, const WorkflowRecord& b) {
  return a.name == b.name && a.input == b.input;
}

}  // namespace

DurableStore::DurableStore(const std::string& path, int busy_timeout_ms)
    : path_(path),
      writer_(std::make_unique<sql::Db>(path, busy_timeout_ms)),
      reader_(std::make_unique<sql::Db>(path, busy_timeout_ms)) {
  writer_->exec("PRAGMA journal_mode=WAL");
  writer_->exec("PRAGMA synchronous=NORMAL");
  {
    sql::WriteTxn txn(*writer_);
    writer_->exec(kSchema);
    txn.commit();
  }
  reader_->exec("PRAGMA query_only=1");
}

DurableStore::~DurableStore() = default;

DurableStore::InsertResult DurableStore::insert_workflow(const WorkflowRecord& record) {
  std::lock_guard lk(write_mu_);
  sql::WriteTxn txn(*writer_);
  if (auto existing = select_workflow(*writer_, record.workflow_id)) {
    if (!same_request(*existing, record)) throw WorkflowConflict(record.workflow_id);
    return {*existing, false};
  }
  insert_workflow_row(*writer_, record);
  txn.commit();
  return {record, true};
}

std::optional<WorkflowRecord> DurableStore::get_workflow(const Uuid& id) const {
  std::lock_guard lk(read_mu_);
  return select_workflow(*reader_, id);
}

std::vector<WorkflowRecord> DurableStore::list_workflows(std::optional<WorkflowStatus> status) const {
  std::lock_guard lk(read_mu_);
  std::string q = std::string("SELECT ") + kWorkflowColumns + " FROM workflows";
  if (status) q += " WHERE status=?";
  q += " ORDER BY created_at, workflow_id";
  sql::Stmt st(*reader_, q.c_str());
  if (status) st.bind(1, to_string(*status));
  std::vector<WorkflowRecord> out;
  while (st.step()) out.push_back(read_workflow(st));
  return out;
}

std::vector<WorkflowRecord> DurableStore::children_of(const Uuid& parent) const {
  std::lock_guard lk(read_mu_);
  std::string q = std::string("SELECT ") + kWorkflowColumns +
                  " FROM workflows WHERE parent_id=? ORDER BY created_at, workflow_id";
  sql::Stmt st(*reader_, q.c_str());
  st.bind(1, parent.str());
  std::vector<WorkflowRecord> out;
  while (st.step()) out.push_back(read_workflow(st));
  return out;
}

bool DurableStore::finish_workflow(const Uuid& id, WorkflowStatus status,
                                   const std::optional<Payload>& output,
                                   const std::optional<std::string>& error) {
  std::lock_guard lk(write_mu_);
  sql::WriteTxn txn(*writer_);
  sql::Stmt st(*writer_,
               "UPDATE workflows SET status=?, output=?, error=?, updated_at=? "
               "WHERE workflow_id=? AND status='PENDING'");
  st.bind(1, to_string(status))
      .bind(2, output ? std::optional<std::string>(output->dump()) : std::nullopt)
      .bind(3, error)
      .bind(4, now_ms())
      .bind(5, id.str());
  st.run();
  bool changed = writer_->changes() > 0;
  txn.commit();
  return changed;
}

WorkflowRecord DurableStore::enqueue_child(const Uuid& parent, std::int64_t seq,
                                           const std::string& queue_name,
                                           const std::string& step_name, const Payload& input) {
  WorkflowRecord child;
  child.workflow_id = Uuid::derive(parent, static_cast<std::uint64_t>(seq));
  child.name = step_name;
  child.input = input;
  child.parent_id = parent;
  child.queue_name = queue_name;
  child.created_at = child.updated_at = now_ms();

  std::lock_guard lk(write_mu_);
  sql::WriteTxn txn(*writer_);
  if (auto existing = select_workflow(*writer_, child.workflow_id)) {
    if (!same_request(*existing, child)) throw WorkflowConflict(child.workflow_id);
    return *existing;
  }
  insert_workflow_row(*writer_, child);
  insert_queue_row(*writer_, queue_name, child.workflow_id);
  sql::Stmt st(*writer_,
               "INSERT OR IGNORE INTO steps (workflow_id, step_seq, name, status, output_or_error, "
               "attempts, started_at, finished_at) VALUES (?,?,?,'SUCCESS',?,1,?,?)");
  st.bind(1, parent.str())
      .bind(2, seq)
      .bind(3, "enqueue:" + step_name)
      .bind(4, Payload(child.workflow_id.str()).dump())
      .bind(5, child.created_at)
      .bind(6, child.created_at);
  st.run();
  txn.commit();
  return child;
}

WorkflowRecord DurableStore::enqueue(const std::string& queue_name, const std::string& step_name,
                                     const Payload& input, std::optional<Uuid> id) {
  WorkflowRecord rec;
  rec.workflow_id = id.value_or(Uuid::random());
  rec.name = step_name;
  rec.input = input;
  rec.queue_name = queue_name;
  rec.created_at = rec.updated_at = now_ms();

  std::lock_guard lk(write_mu_);
  sql::WriteTxn txn(*writer_);
  if (auto existing = select_workflow(*writer_, rec.workflow_id)) {
    if (!same_request(*existing, rec)) throw WorkflowConflict(rec.workflow_id);
    return *existing;
  }
  insert_workflow_row(*writer_, rec);
  insert_queue_row(*writer_, queue_name, rec.workflow_id);
  txn.commit();
  return rec;
}

std::optional<QueueEntry> DurableStore::claim_next(const std::string& queue_name,
                                                   const std::string& worker_id,
                                                   const QueueConfig& config) {
  std::lock_guard lk(write_mu_);
  sql::WriteTxn txn(*writer_);
  std::int64_t global = 0;
  std::int64_t mine = 0;
  {
    sql::Stmt st(*writer_,
                 "SELECT COUNT(*), COALESCE(SUM(claimed_by=?),0) FROM queue "
                 "WHERE queue_name=? AND claimed_by IS NOT NULL");
    st.bind(1, worker_id).bind(2, queue_name);
    if (st.step()) {
      global = st.int64(0);
      mine = st.int64(1);
    }
  }
  if (global >= config.concurrency || mine >= config.worker_concurrency) return std::nullopt;

  QueueEntry entry;
  {
    sql::Stmt st(*writer_,
                 "SELECT seq, workflow_id FROM queue WHERE queue_name=? AND claimed_by IS NULL "
                 "ORDER BY seq LIMIT 1");
    st.bind(1, queue_name);
    if (!st.step()) return std::nullopt;
    entry.seq = st.int64(0);
    entry.workflow_id = must_parse(st.text(1));
  }
  const std::int64_t now = now_ms();
  {
    sql::Stmt st(*writer_,
                 "UPDATE queue SET claimed_by=?, claimed_at=?, heartbeat_at=? "
                 "WHERE seq=? AND claimed_by IS NULL");
    st.bind(1, worker_id).bind(2, now).bind(3, now).bind(4, entry.seq);
    st.run();
  }
  {
    sql::Stmt st(*writer_, "UPDATE workflows SET executor_id=?, updated_at=? WHERE workflow_id=?");
    st.bind(1, worker_id).bind(2, now).bind(3, entry.workflow_id.str());
    st.run();
  }
  txn.commit();
  entry.queue_name = queue_name;
  entry.claimed_by = worker_id;
  entry.claimed_at = now;
  entry.heartbeat_at = now;
  return entry;
}

void DurableStore::release_claim(const Uuid& workflow_id) {
  std::lock_guard lk(write_mu_);
  sql::WriteTxn txn(*writer_);
  sql::Stmt st(*writer_,
               "UPDATE queue SET claimed_by=NULL, claimed_at=NULL, heartbeat_at=NULL "
               "WHERE workflow_id=?");
  st.bind(1, workflow_id.str());
  st.run();
  txn.commit();
}

void DurableStore::finish_queued(const Uuid& workflow_id, WorkflowStatus status,
                                 const std::optional<Payload>& output,
                                 const std::optional<std::string>& error) {
  std::lock_guard lk(write_mu_);
  sql::WriteTxn txn(*writer_);
  {
    sql::Stmt st(*writer_,
                 "UPDATE workflows SET status=?, output=?, error=?, updated_at=? "
                 "WHERE workflow_id=? AND status='PENDING'");
    st.bind(1, to_string(status))
        .bind(2, output ? std::optional<std::string>(output->dump()) : std::nullopt)
        .bind(3, error)
        .bind(4, now_ms())
        .bind(5, workflow_id.str());
    st.run();
  }
  {
    sql::Stmt st(*writer_, "DELETE FROM queue WHERE workflow_id=?");
    st.bind(1, workflow_id.str());
    st.run();
  }
  txn.commit();
}

std::vector<QueueEntry> DurableStore::list_queue(const std::string& queue_name) const {
  std::lock_guard lk(read_mu_);
  sql::Stmt st(*reader_,
               "SELECT seq, workflow_id, claimed_by, claimed_at, heartbeat_at FROM queue "
               "WHERE queue_name=? ORDER BY seq");
  st.bind(1, queue_name);
  std::vector<QueueEntry> out;
  while (st.step()) {
    QueueEntry e;
    e.seq = st.int64(0);
    e.queue_name = queue_name;
    e.workflow_id = must_parse(st.text(1));
    e.claimed_by = st.opt_text(2);
    e.claimed_at = st.opt_int64(3);
    e.heartbeat_at = st.opt_int64(4);
    out.push_back(std::move(e));
  }
  return out;
}

int DurableStore::count_claimed(const std::string& queue_name,
                                const std::optional<std::string>& worker) const {
  std::lock_guard lk(read_mu_);
  sql::Stmt st(*reader_,
               worker ? "SELECT COUNT(*) FROM queue WHERE queue_name=? AND claimed_by=?"
                      : "SELECT COUNT(*) FROM queue WHERE queue_name=? AND claimed_by IS NOT NULL");
  st.bind(1, queue_name);
  if (worker) st.bind(2, *worker);
  st.step();
  return static_cast<int>(st.int64(0));
}

std::optional<StepRecord> DurableStore::get_step(const Uuid& workflow_id, std::int64_t seq) const {
  std::lock_guard lk(read_mu_);
  sql::Stmt st(*reader_,
               "SELECT name, status, output_or_error, attempts, started_at, finished_at FROM steps "
               "WHERE workflow_id=? AND step_seq=?");
  st.bind(1, workflow_id.str()).bind(2, seq);
  if (!st.step()) return std::nullopt;
  StepRecord r;
  r.workflow_id = workflow_id;
  r.step_seq = seq;
  r.name = st.text(0);
  r.status = step_status_from(st.text(1));
  if (auto p = st.opt_text(2)) r.output_or_error = Payload::parse(*p);
  r.attempts = static_cast<int>(st.int64(3));
  r.started_at = st.opt_int64(4);
  r.finished_at = st.opt_int64(5);
  return r;
}

void DurableStore::begin_attempt(const Uuid& workflow_id, std::int64_t seq,
                                 const std::string& name, int attempt) {
  std::lock_guard lk(write_mu_);
  sql::WriteTxn txn(*writer_);
  const std::int64_t now = now_ms();
  sql::Stmt st(*writer_,
               "INSERT INTO steps (workflow_id, step_seq, name, status, attempts, started_at) "
               "VALUES (?,?,?,'RUNNING',?,?) "
               "ON CONFLICT(workflow_id, step_seq) DO UPDATE SET status='RUNNING', "
               "attempts=excluded.attempts, started_at=COALESCE(steps.started_at, excluded.started_at) "
               "WHERE steps.status NOT IN ('SUCCESS','ERROR')");
  st.bind(1, workflow_id.str()).bind(2, seq).bind(3, name).bind(4, attempt).bind(5, now);
  st.run();
  txn.commit();
}

void DurableStore::record_step(const Uuid& workflow_id, std::int64_t seq, StepStatus status,
                               const Payload& output_or_error, int attempts) {
  std::lock_guard lk(write_mu_);
  sql::WriteTxn txn(*writer_);
  const std::int64_t now = now_ms();
  sql::Stmt st(*writer_,
               "UPDATE steps SET status=?, output_or_error=?, attempts=?, finished_at=? "
               "WHERE workflow_id=? AND step_seq=? AND status NOT IN ('SUCCESS','ERROR')");
  st.bind(1, to_string(status))
      .bind(2, output_or_error.dump())
      .bind(3, attempts)
      .bind(4, now)
      .bind(5, workflow_id.str())
      .bind(6, seq);
  st.run();
  txn.commit();
}

std::int64_t DurableStore::set_event(const Uuid& workflow_id, const std::string& key,
                                     const Payload& value) {
  std::lock_guard lk(write_mu_);
  sql::WriteTxn txn(*writer_);
  {
    sql::Stmt st(*writer_, "SELECT 1 FROM workflows WHERE workflow_id=?");
    st.bind(1, workflow_id.str());
    if (!st.step()) throw UnknownWorkflow(workflow_id);
  }
  {
    sql::Stmt st(*writer_,
                 "INSERT INTO events (workflow_id, key, value, version) VALUES (?,?,?,1) "
                 "ON CONFLICT(workflow_id, key) DO UPDATE SET value=excluded.value, "
                 "version=events.version+1");
    st.bind(1, workflow_id.str()).bind(2, key).bind(3, value.dump());
    st.run();
  }
  std::int64_t version = 0;
  {
    sql::Stmt st(*writer_, "SELECT version FROM events WHERE workflow_id=? AND key=?");
    st.bind(1, workflow_id.str()).bind(2, key);
    st.step();
    version = st.int64(0);
  }
  txn.commit();
  return version;
}

std::optional<EventRecord> DurableStore::get_event(const Uuid& workflow_id,
                                                   const std::string& key) const {
  std::lock_guard lk(read_mu_);
  sql::Stmt st(*reader_, "SELECT value, version FROM events WHERE workflow_id=? AND key=?");
  st.bind(1, workflow_id.str()).bind(2, key);
  if (!st.step()) return std::nullopt;
  EventRecord e;
  e.workflow_id = workflow_id;
  e.key = key;
  e.value = Payload::parse(st.text(0));
  e.version = st.int64(1);
  return e;
}

std::vector<HandleStatus> DurableStore::poll(std::span<const Uuid> ids) const {
  constexpr std::size_t kChunk = 400;
  std::vector<HandleStatus> out;
  out.reserve(ids.size());
  std::lock_guard lk(read_mu_);
  // One read transaction so every handle is observed at the same instant.
  reader_->exec("BEGIN");
  try {
    for (std::size_t base = 0; base < ids.size(); base += kChunk) {
      const std::size_t n = std::min(kChunk, ids.size() - base);
      std::string q =
          "SELECT w.workflow_id, w.status, w.output, w.error, q.claimed_by, s.status, "
          "s.attempts, s.started_at, s.finished_at FROM workflows w "
          "LEFT JOIN queue q ON q.workflow_id = w.workflow_id "
          "LEFT JOIN steps s ON s.workflow_id = w.workflow_id AND s.step_seq = 0 "
          "WHERE w.workflow_id IN (";
      for (std::size_t i = 0; i < n; ++i) q += i ? ",?" : "?";
      q += ")";
      sql::Stmt st(*reader_, q.c_str());
      for (std::size_t i = 0; i < n; ++i) st.bind(static_cast<int>(i + 1), ids[base + i].str());
      std::unordered_map<Uuid, HandleStatus> rows;
      while (st.step()) {
        HandleStatus h;
        h.workflow_id = must_parse(st.text(0));
        h.status = workflow_status_from(st.text(1));
        if (auto o = st.opt_text(2)) h.output = Payload::parse(*o);
        h.error = st.opt_text(3);
        h.claimed = !st.is_null(4);
        if (auto s = st.opt_text(5)) h.step_status = step_status_from(*s);
        h.attempts = st.is_null(6) ? 0 : static_cast<int>(st.int64(6));
        h.started_at = st.opt_int64(7);
        h.finished_at = st.opt_int64(8);
        rows.emplace(h.workflow_id, std::move(h));
      }
      for (std::size_t i = 0; i < n; ++i) {
        auto it = rows.find(ids[base + i]);
        if (it == rows.end()) throw UnknownWorkflow(ids[base + i]);
        out.push_back(it->second);
      }
    }
  } catch (...) {
    sqlite3_exec(reader_->handle(), "ROLLBACK", nullptr, nullptr, nullptr);
    throw;
  }
  reader_->exec("COMMIT");
  return out;
}

void DurableStore::heartbeat(const std::string& worker_id, std::int64_t now) {
  std::lock_guard lk(write_mu_);
  sql::WriteTxn txn(*writer_);
  {
    sql::Stmt st(*writer_, "UPDATE queue SET heartbeat_at=? WHERE claimed_by=?");
    st.bind(1, now).bind(2, worker_id);
    st.run();
  }
  {
    sql::Stmt st(*writer_,
                 "UPDATE workflows SET heartbeat_at=? WHERE executor_id=? AND status='PENDING' "
                 "AND queue_name IS NULL");
    st.bind(1, now).bind(2, worker_id);
    st.run();
  }
  txn.commit();
}

DurableStore::Adoption DurableStore::adopt_stale(const std::string& worker_id, std::int64_t now,
                                                 std::int64_t stale_before, bool include_own) {
  Adoption result;
  std::lock_guard lk(write_mu_);
  sql::WriteTxn txn(*writer_);
  {
    sql::Stmt st(*writer_,
                 "SELECT workflow_id FROM queue WHERE claimed_by IS NOT NULL AND "
                 "((? AND claimed_by=?) OR (claimed_by<>? AND "
                 "COALESCE(heartbeat_at, claimed_at, 0) < ?)) ORDER BY seq");
    st.bind(1, include_own ? 1 : 0).bind(2, worker_id).bind(3, worker_id).bind(4, stale_before);
    while (st.step()) result.released.push_back(must_parse(st.text(0)));
  }
  for (const auto& id : result.released) {
    sql::Stmt st(*writer_,
                 "UPDATE queue SET claimed_by=NULL, claimed_at=NULL, heartbeat_at=NULL "
                 "WHERE workflow_id=?");
    st.bind(1, id.str());
    st.run();
  }
  {
    sql::Stmt st(*writer_,
                 "SELECT workflow_id FROM workflows WHERE status='PENDING' AND queue_name IS NULL "
                 "AND ((? AND executor_id=?) OR ((executor_id IS NULL OR executor_id<>?) AND "
                 "COALESCE(heartbeat_at, 0) < ?)) ORDER BY created_at, workflow_id");
    st.bind(1, include_own ? 1 : 0).bind(2, worker_id).bind(3, worker_id).bind(4, stale_before);
    while (st.step()) result.workflows.push_back(must_parse(st.text(0)));
  }
  for (const auto& id : result.workflows) {
    sql::Stmt st(*writer_,
                 "UPDATE workflows SET executor_id=?, heartbeat_at=?, updated_at=? "
                 "WHERE workflow_id=?");
    st.bind(1, worker_id).bind(2, now).bind(3, now).bind(4, id.str());
    st.run();
  }
  txn.commit();
  return result;
}

}  // namespace s3mirror::durable
