//! Starts the environment server on an ephemeral TCP port and drives one
//! episode from a client in the same process, the way an external trainer
//! would: reset, then one `act` line per slot with every node's `(μ, ν)`.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;

use netsampler::harness::server;
use serde_json::{json, Value};

fn request(stream: &mut TcpStream, reader: &mut impl BufRead, msg: &Value) -> std::io::Result<Value> {
    writeln!(stream, "{msg}")?;
    let mut line = String::new();
    reader.read_line(&mut line)?;
    Ok(serde_json::from_str(&line).expect("server replies are JSON"))
}

fn main() -> netsampler::Result<()> {
    let listener = server::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;
    std::thread::spawn(move || server::serve_tcp(listener));
    println!("server on {addr}");

    let mut stream = TcpStream::connect(addr)?;
    stream.set_nodelay(true)?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let reset = json!({"type": "reset", "seed": 7, "graph": {"kind": "watts_strogatz", "m": 6, "k": 2, "beta": 0.0}, "steps": 6});
    let obs = request(&mut stream, &mut reader, &reset)?;
    let m = obs["per_node"].as_array().map_or(0, Vec::len);
    println!("reset: m={m} adjacency {}", obs["adjacency"]);

    // Even nodes send their own sample clockwise on even slots, odd nodes
    // on odd slots; nobody addresses a node that is transmitting.
    let mut total = 0.0;
    for slot in 0.. {
        let decisions: Vec<[usize; 2]> = (0..m)
            .map(|i| if i % 2 == slot % 2 { [i, (i + 1) % m] } else { [i, i] })
            .collect();
        let reply = request(&mut stream, &mut reader, &json!({"type": "act", "decisions": decisions}))?;
        total += reply["reward"].as_f64().unwrap_or(f64::NAN);
        println!("slot {slot}: reward {:.4} feedback {}", reply["reward"], reply["outcome"]["feedback"]);
        if reply["done"] == true {
            break;
        }
    }
    println!("episode ASEE {:.4}", -total / 6.0);

    let bad = request(&mut stream, &mut reader, &json!({"type": "act", "decisions": vec![[0, 0]; m]}))?;
    println!("after done: {bad}");
    Ok(())
}
