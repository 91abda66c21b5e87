/**
 * WebSocket wrapper: parses incoming documents into the latest-wins mailbox,
 * tracks connection status for the UI, and supports manual retry. Disconnects
 * clear the mailbox so the render loop never consumes half-applied state.
 */

import { Mailbox } from "./mailbox";
import { parseServerMessage, ServerMessage } from "./protocol";

export type ConnectionStatus = "connecting" | "open" | "closed" | "failed";

export class SessionConnection {
  readonly mailbox = new Mailbox<ServerMessage>();
  status: ConnectionStatus = "closed";
  onStatus: (s: ConnectionStatus) => void = () => {};
  private ws: WebSocket | null = null;

  constructor(readonly url: string) {}

  connect(): void {
    this.close();
    this.setStatus("connecting");
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => this.setStatus("open");
    ws.onmessage = (ev: MessageEvent) => {
      const msg = parseServerMessage(String(ev.data));
      if (msg !== null) this.mailbox.put(msg);
    };
    ws.onerror = () => this.setStatus("failed");
    ws.onclose = () => {
      this.mailbox.clear();
      if (this.status !== "failed") this.setStatus("closed");
    };
  }

  close(): void {
    if (this.ws) {
      this.ws.onclose = null;
      this.ws.close();
      this.ws = null;
    }
    this.mailbox.clear();
  }

  /** Send a pre-encoded document; drops silently unless the socket is open. */
  send(encoded: string): boolean {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(encoded);
      return true;
    }
    return false;
  }

  private setStatus(s: ConnectionStatus): void {
    this.status = s;
    this.onStatus(s);
  }
}
