//! Link layer: logical messages of any size are cut into frames that respect
//! the per-edge budget (strict mode) and reassembled at the receiver.
//!
//! Each directed edge keeps a FIFO of pending messages. Per round, a frame of
//! at most `bit_budget` bits is taken from the queue head; a message whose
//! last bit leaves in round `t` is handed to the receiver in round `t + 1`.
//! In non-strict mode the whole queue leaves in a single frame.

use std::collections::VecDeque;

use super::{CongestNetwork, Envelope, Mailbox, NodeCtx, Outbox, Payload, RoundStats, SimError};

#[derive(Debug, Clone)]
pub struct Frame<M> {
    pub bits: u64,
    pub completed: Vec<M>,
}

impl<M> Payload for Frame<M> {
    fn bit_len(&self) -> u64 {
        self.bits
    }
}

/// Bits a logical message occupies on the wire (never zero).
pub fn wire_bits<M: Payload>(m: &M) -> u64 {
    m.bit_len().max(1)
}

/// Frames needed for a back-to-back queue of `bits` bits.
pub fn frames_for(bits: u64, budget: u64, strict: bool) -> u64 {
    if bits == 0 {
        0
    } else if strict {
        bits.div_ceil(budget)
    } else {
        1
    }
}

/// Runs a protocol until no frames are in flight and all queues are drained.
/// `step` is called for every node in every round with the logical messages
/// that finished arriving; `ctx.round` counts from 1 within the protocol.
pub fn run_protocol<S, M, F>(
    net: &mut CongestNetwork,
    states: &mut [S],
    max_rounds: u64,
    mut step: F,
) -> Result<RoundStats, SimError>
where
    M: Payload + Clone,
    F: FnMut(&mut NodeCtx<'_>, &mut S, &[Envelope<M>], &mut Outbox<M>),
{
    let n = net.len();
    if states.len() != n {
        return Err(SimError::StateCount { got: states.len(), expected: n });
    }
    let budget = net.bit_budget();
    let cap = if net.is_strict() { budget } else { u64::MAX };
    let mut wrapped: Vec<(&mut S, Vec<VecDeque<(u64, M)>>)> = states
        .iter_mut()
        .enumerate()
        .map(|(v, s)| {
            let deg = net.neighbors(v.into()).len();
            (s, (0..deg).map(|_| VecDeque::new()).collect())
        })
        .collect();
    let mut mailbox: Mailbox<Frame<M>> = Mailbox::new(n);
    let mut total = RoundStats::default();
    let mut failure: Option<SimError> = None;
    let base = net.round();
    loop {
        if total.rounds_elapsed >= max_rounds {
            return Err(SimError::NoQuiescence(max_rounds));
        }
        let delta = net.run_round(&mut wrapped, &mut mailbox, |ctx, (state, queues), frames, out| {
            ctx.round -= base;
            let inbox: Vec<Envelope<M>> = frames
                .iter()
                .flat_map(|f| f.msg.completed.iter().map(move |m| (f.from, m)))
                .map(|(from, m)| Envelope { from, msg: m.clone() })
                .collect();
            let mut logical = Outbox::new();
            step(ctx, state, &inbox, &mut logical);
            for (to, msg) in logical.sends {
                match ctx.neighbors.binary_search(&to) {
                    Ok(k) => queues[k].push_back((wire_bits(&msg), msg)),
                    Err(_) => {
                        failure.get_or_insert(SimError::NotNeighbor { round: ctx.round, from: ctx.id, to });
                    }
                }
            }
            for (k, q) in queues.iter_mut().enumerate() {
                if q.is_empty() {
                    continue;
                }
                let mut room = cap;
                let mut frame = Frame { bits: 0, completed: Vec::new() };
                while room > 0 {
                    let Some(head) = q.front_mut() else { break };
                    let take = head.0.min(room);
                    head.0 -= take;
                    room -= take;
                    frame.bits += take;
                    if head.0 == 0 {
                        let (_, m) = q.pop_front().expect("non-empty queue");
                        frame.completed.push(m);
                    }
                }
                out.send(ctx.neighbors[k], frame);
            }
        })?;
        total.absorb(&delta);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        if mailbox.is_empty() && wrapped.iter().all(|(_, qs)| qs.iter().all(VecDeque::is_empty)) {
            return Ok(total);
        }
    }
}
