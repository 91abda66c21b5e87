"""Drive the streaming session service with a scripted client.

Starts the WebSocket service in-process, connects, streams a few pinch
frames, flips the barrier off over the wire, and prints the returned states.
The browser UI in frontend/ speaks exactly this protocol.

Run:  python demos/06_streaming_service.py
"""

import asyncio
import json
import queue
import threading

from websockets.sync.client import connect

from handretarget import RetargetParams
from handretarget.serve import start_server
from handretarget.traces import fixture_model, generate_trace

model = fixture_model()
port_q: queue.Queue = queue.Queue()


def server_thread():
    async def main():
        server = await start_server(model, RetargetParams(), host="127.0.0.1", port=0)
        port_q.put(server.sockets[0].getsockname()[1])
        await asyncio.get_running_loop().create_future()

    asyncio.run(main())


threading.Thread(target=server_thread, daemon=True).start()
port = port_q.get(timeout=10)
print(f"service listening on ws://127.0.0.1:{port}")

frames = generate_trace(model, "pinch", n_frames=400, rate=100.0)
with connect(f"ws://127.0.0.1:{port}") as ws:
    hello = json.loads(ws.recv())
    print(f"received model document: {len(hello['joints'])} joints, "
          f"{len(hello['collision_pairs'])} monitored pairs")

    for k, f in enumerate(frames):
        ws.send(json.dumps({"type": "frame", "t": f.timestamp,
                            "kp": f.keypoints.tolist()}))
        state = json.loads(ws.recv())
        if k in (0, 200, 399):
            h_min = min(entry["h"] for entry in state["h"])
            active = [entry["pair"] for entry in state["h"] if entry["active"]]
            print(f"frame {k:3d}: h_min={h_min * 1e3:+.2f} mm  active rows: {active}  "
                  f"status={state['qp_status']}")

    print("\nswitching the barrier off over the wire and replaying the approach...")
    ws.send(json.dumps({"type": "params", "cbf_enabled": False}))
    ws.send(json.dumps({"type": "reset"}))
    for k, f in enumerate(frames):
        ws.send(json.dumps({"type": "frame", "t": f.timestamp + 10.0,
                            "kp": f.keypoints.tolist()}))
        state = json.loads(ws.recv())
    h_min = min(entry["h"] for entry in state["h"])
    print(f"unconstrained final step: h_min={h_min * 1e3:+.2f} mm "
          f"(tracks the raw gesture straight into penetration)")
