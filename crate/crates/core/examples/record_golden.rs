//! Records the movie scenario as a JSONL trace.
//!
//! cargo run -p tabviz-core --example record_golden -- path/to/trace.jsonl

use std::fs::File;
use std::io::BufWriter;
use std::sync::Arc;

use tabviz_core::session::scenario::{movie_scenario, record};
use tabviz_core::session::{Catalog, Engine, JsonlSink, Session, SessionConfig};

fn main() -> std::io::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "golden_scenario.jsonl".into());
    let config = SessionConfig::default();
    let mut session = Session::new(0, Catalog::new(Arc::new(Engine::movies())), config);
    let mut sink = JsonlSink::new(BufWriter::new(File::create(&path)?));
    record(&mut session, &movie_scenario(config.gesture), &mut sink);
    sink.finish()?;
    println!("{path}");
    Ok(())
}
