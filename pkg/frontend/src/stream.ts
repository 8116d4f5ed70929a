// One WebSocket per session. The server replays the epoch's backlog on
// connect, so reconnecting after a drop loses nothing — the SessionView
// projection skips the overlap. A close with code 4404 means the session is
// gone; transports that reject the handshake outright (no close code) are
// disambiguated by probing the session endpoint before retrying.

import { StreamMessage, parseStreamMessage } from "./wire";

export type StreamStatus = "connecting" | "open" | "closed" | "gone";

export interface StreamHandlers {
  onMessage(msg: StreamMessage): void;
  onStatus?(status: StreamStatus): void;
  /** resolves false when the session no longer exists; stops reconnecting */
  sessionExists?(): Promise<boolean>;
}

export class SessionStream {
  private ws: WebSocket | null = null;
  private closed = false;
  private retryMs = 500;

  constructor(
    private url: string,
    private handlers: StreamHandlers,
  ) {
    this.open();
  }

  private status(s: StreamStatus): void {
    this.handlers.onStatus?.(s);
  }

  private open(): void {
    this.status("connecting");
    const ws = new WebSocket(this.url);
    this.ws = ws;

    ws.onopen = () => {
      this.retryMs = 500;
      this.status("open");
    };

    ws.onmessage = (ev: MessageEvent) => {
      let msg: StreamMessage;
      try {
        msg = parseStreamMessage(String(ev.data));
      } catch (err) {
        console.error("dropping malformed stream message:", err);
        return;
      }
      this.handlers.onMessage(msg);
    };

    ws.onclose = (ev: CloseEvent) => {
      if (this.closed) return;
      if (ev.code === 4404) {
        this.status("gone");
        return;
      }
      void this.retry();
    };

    ws.onerror = () => {
      // onclose handles scheduling the retry
    };
  }

  private async retry(): Promise<void> {
    if (this.handlers.sessionExists !== undefined) {
      let exists = true;
      try {
        exists = await this.handlers.sessionExists();
      } catch {
        // probe failed (server unreachable); keep retrying the socket
      }
      if (this.closed) return;
      if (!exists) {
        this.status("gone");
        return;
      }
    }
    // capped backoff, then replay-from-backlog on the new connection
    setTimeout(() => {
      if (!this.closed) this.open();
    }, this.retryMs);
    this.retryMs = Math.min(this.retryMs * 2, 8000);
    this.status("connecting");
  }

  close(): void {
    this.closed = true;
    this.status("closed");
    this.ws?.close();
  }
}
