"""Streaming session service for interactive clients.

Serves one retargeting session per WebSocket connection. Messages are JSON
documents, one per frame:

client -> server
    {"type": "frame", "t": seconds, "kp": [[x, y, z], ...]}
    {"type": "params", ...partial parameter fields...}
    {"type": "reset"}

server -> client
    on connect: {"type": "model", ...full model document...}
    per frame:  {"type": "state", "q": [...],
                 "h": [{"pair": [i, j], "h": float, "active": bool}, ...],
                 "kp_robot": [[...]], "latency_s": float, "qp_status": "..."}
    on bad input: {"type": "error", "msg": "..."}

Parameter changes apply between steps, never mid-solve (the handler is
sequential per connection). Connections are isolated: each owns its session.
"""

from __future__ import annotations

import asyncio
import dataclasses
import json

import numpy as np
import websockets

from .model import HandModel, serialize_model
from .retarget import KeypointFrame, RetargetParams, RetargetSession

_PARAM_FIELDS = {f.name for f in dataclasses.fields(RetargetParams)}


def state_message(model: HandModel, result) -> dict:
    return {
        "type": "state",
        "q": result.q.tolist(),
        "h": [
            {
                "pair": [int(i), int(j)],
                "h": float(h),
                "active": (int(i), int(j)) in set(result.active_cbf_pairs),
            }
            for (i, j), h in zip(model.collision_pairs, result.pair_clearances)
        ],
        "kp_robot": result.robot_keypoints.tolist(),
        "latency_s": result.solve_latency,
        "qp_status": result.qp_status,
    }


async def _handle(ws, model: HandModel, params: RetargetParams):
    session = RetargetSession(model, params)
    model_doc = json.loads(serialize_model(model))
    await ws.send(json.dumps({"type": "model", **model_doc}))
    async for raw in ws:
        try:
            msg = json.loads(raw)
            kind = msg.get("type")
        except (json.JSONDecodeError, AttributeError):
            await ws.send(json.dumps({"type": "error", "msg": "not a JSON object"}))
            continue
        if kind == "frame":
            try:
                frame = KeypointFrame(
                    timestamp=float(msg["t"]),
                    keypoints=np.array(msg["kp"], dtype=float),
                )
                result = session.step(frame)
            except (KeyError, TypeError, ValueError) as e:
                await ws.send(json.dumps({"type": "error", "msg": str(e)}))
                continue
            await ws.send(json.dumps(state_message(model, result)))
        elif kind == "params":
            fields = {k: v for k, v in msg.items() if k != "type"}
            unknown = set(fields) - _PARAM_FIELDS
            if unknown:
                await ws.send(
                    json.dumps(
                        {"type": "error", "msg": f"unknown params: {sorted(unknown)}"}
                    )
                )
                continue
            try:
                session.set_params(dataclasses.replace(session.params, **fields))
            except ValueError as e:
                await ws.send(json.dumps({"type": "error", "msg": str(e)}))
        elif kind == "reset":
            session.reset()
        else:
            await ws.send(
                json.dumps({"type": "error", "msg": f"unknown message type {kind!r}"})
            )


async def start_server(
    model: HandModel, params: RetargetParams, host: str = "127.0.0.1", port: int = 8765
):
    """Bind and return the server; ``port=0`` picks a free port."""
    return await websockets.serve(lambda ws: _handle(ws, model, params), host, port)


def run_server(
    model: HandModel, params: RetargetParams, host: str = "127.0.0.1", port: int = 8765
) -> None:
    """Blocking entry point used by the command line."""

    async def _main():
        server = await start_server(model, params, host, port)
        bound = server.sockets[0].getsockname()
        print(f"serving session protocol on ws://{bound[0]}:{bound[1]}")
        await asyncio.get_running_loop().create_future()

    asyncio.run(_main())
