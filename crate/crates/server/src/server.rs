//! Newline-delimited JSON over TCP, one session per connection.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use tabviz_core::canonical;
use tabviz_core::session::{
    Catalog, ClientMessage, JsonlSink, ServerMessage, Session, SessionConfig, TraceRecord, TraceSink,
};
use tokio::io::{AsyncBufReadExt, AsyncWrite, AsyncWriteExt, BufReader};
use tokio::net::{TcpListener, TcpStream};

/// Shared, read-only server state. Sessions own everything mutable.
pub struct Server {
    catalog: Catalog,
    config: SessionConfig,
    trace_dir: Option<PathBuf>,
    next_id: AtomicU64,
}

impl Server {
    pub fn new(catalog: Catalog, config: SessionConfig, trace_dir: Option<PathBuf>) -> Self {
        Server {
            catalog,
            config,
            trace_dir,
            next_id: AtomicU64::new(1),
        }
    }

    fn open_session(&self) -> (Session, Option<JsonlSink<BufWriter<File>>>) {
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let session = Session::new(id, self.catalog.clone(), self.config);
        let sink = self.trace_dir.as_ref().and_then(|dir| {
            let path = dir.join(format!("session-{id}.jsonl"));
            match File::create(&path) {
                Ok(f) => {
                    let mut sink = JsonlSink::new(BufWriter::new(f));
                    sink.record(&TraceRecord::Meta {
                        meta: session.trace_meta(),
                    });
                    Some(sink)
                }
                Err(e) => {
                    eprintln!("session {id}: not recording, cannot create {}: {e}", path.display());
                    None
                }
            }
        });
        (session, sink)
    }
}

/// Accept connections until the listener fails.
pub async fn serve(listener: TcpListener, server: Arc<Server>) -> std::io::Result<()> {
    loop {
        let (stream, peer) = listener.accept().await?;
        let server = server.clone();
        tokio::spawn(async move {
            if let Err(e) = connection(stream, &server).await {
                eprintln!("{peer}: {e}");
            }
        });
    }
}

async fn send(writer: &mut (impl AsyncWrite + Unpin), messages: &[ServerMessage]) -> std::io::Result<()> {
    let mut buf = String::new();
    for m in messages {
        buf.push_str(&canonical::to_string(m));
        buf.push('\n');
    }
    writer.write_all(buf.as_bytes()).await?;
    writer.flush().await
}

async fn connection(stream: TcpStream, server: &Server) -> std::io::Result<()> {
    let (read, mut write) = stream.into_split();
    let (mut session, mut sink) = server.open_session();
    send(&mut write, &[session.hello(), ServerMessage::Snapshot(Box::new(session.snapshot()))]).await?;

    let mut lines = BufReader::new(read).lines();
    while let Some(line) = lines.next_line().await? {
        if line.trim().is_empty() {
            continue;
        }
        let replies = match serde_json::from_str::<ClientMessage>(&line) {
            Ok(msg) => match sink.as_mut() {
                Some(s) => session.handle_recorded(&msg, s),
                None => session.handle(&msg),
            },
            // unparseable lines never reach the engine, so they stay out of the trace
            Err(_) => session.handle_line(&line),
        };
        send(&mut write, &replies).await?;
    }
    if let Some(s) = sink {
        s.finish()?;
    }
    Ok(())
}
