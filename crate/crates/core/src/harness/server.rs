//! Transports for [`Session`]: stdio and TCP, one session per connection.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};

use super::protocol::Session;
use crate::error::Result;

/// Serves one session over a line-oriented reader/writer pair until EOF.
pub fn serve_stream(input: impl BufRead, mut output: impl Write) -> Result<()> {
    let mut session = Session::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut reply = session.handle_line(&line);
        reply.push('\n');
        output.write_all(reply.as_bytes())?;
        output.flush()?;
    }
    Ok(())
}

pub fn serve_stdio() -> Result<()> {
    let stdin = std::io::stdin();
    serve_stream(stdin.lock(), std::io::stdout().lock())
}

fn handle_connection(stream: TcpStream) -> Result<()> {
    // one small reply per request; batching only adds latency
    stream.set_nodelay(true)?;
    let reader = BufReader::new(stream.try_clone()?);
    serve_stream(reader, stream)
}

/// Accepts connections forever, one thread and one independent session
/// per connection. A dropped connection discards its session.
pub fn serve_tcp(listener: TcpListener) -> Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        std::thread::spawn(move || {
            // a client hanging up mid-line just ends its session
            let _ = handle_connection(stream);
        });
    }
    Ok(())
}

pub fn bind(addr: impl ToSocketAddrs) -> Result<TcpListener> {
    Ok(TcpListener::bind(addr)?)
}
